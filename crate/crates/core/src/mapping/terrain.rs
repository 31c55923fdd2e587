use std::io::{Read, Write};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::ingest::csvio;

/// A rung on the qualitative terrain-complexity ladder.
///
/// `name` may list synonyms separated by `/` (e.g. `asphalt/tile`); lookups
/// accept the full name or any synonym, case-insensitively.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TerrainClass {
    pub name: String,
    pub ordinal: u32,
    pub descriptors: Vec<String>,
}

impl TerrainClass {
    pub fn new(name: impl Into<String>, ordinal: u32, descriptors: &[&str]) -> Result<Self> {
        let name = name.into();
        if name.trim().is_empty() {
            return Err(Error::param("terrain name must not be empty"));
        }
        if ordinal < 1 {
            return Err(Error::param(format!("terrain '{name}' ordinal must be >= 1")));
        }
        Ok(Self {
            name,
            ordinal,
            descriptors: descriptors.iter().map(|d| d.to_string()).collect(),
        })
    }

    /// First synonym, used for axis labels.
    pub fn short_name(&self) -> &str {
        self.name.split('/').next().unwrap_or(&self.name).trim()
    }

    fn matches(&self, key: &str) -> bool {
        normalize(&self.name) == key || self.name.split('/').any(|syn| normalize(syn) == key)
    }
}

fn normalize(s: &str) -> String {
    s.trim()
        .to_lowercase()
        .replace(['_', '-'], " ")
        .split_whitespace()
        .collect::<Vec<_>>()
        .join(" ")
}

/// Ordered set of terrain classes with unique ordinals.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TerrainScale {
    classes: Vec<TerrainClass>,
}

impl TerrainScale {
    pub fn new(mut classes: Vec<TerrainClass>) -> Result<Self> {
        if classes.is_empty() {
            return Err(Error::Validation("terrain scale is empty".into()));
        }
        classes.sort_by_key(|c| c.ordinal);
        for pair in classes.windows(2) {
            if pair[0].ordinal == pair[1].ordinal {
                return Err(Error::Validation(format!(
                    "terrains '{}' and '{}' share ordinal {}",
                    pair[0].name, pair[1].name, pair[0].ordinal
                )));
            }
        }
        for (i, a) in classes.iter().enumerate() {
            for b in &classes[i + 1..] {
                if a.name.split('/').any(|syn| b.matches(&normalize(syn))) {
                    return Err(Error::Validation(format!(
                        "terrain name '{}' is ambiguous between ordinals {} and {}",
                        a.name, a.ordinal, b.ordinal
                    )));
                }
            }
        }
        Ok(Self { classes })
    }

    pub fn classes(&self) -> &[TerrainClass] {
        &self.classes
    }

    pub fn max_ordinal(&self) -> u32 {
        self.classes.last().map_or(0, |c| c.ordinal)
    }

    pub fn lookup(&self, name: &str) -> Result<&TerrainClass> {
        let key = normalize(name);
        self.classes
            .iter()
            .find(|c| c.matches(&key))
            .ok_or_else(|| Error::NotFound(format!("terrain '{name}' is not in the terrain scale")))
    }

    pub fn by_ordinal(&self, ordinal: u32) -> Option<&TerrainClass> {
        self.classes.iter().find(|c| c.ordinal == ordinal)
    }

    /// Reads an override scale from CSV with header `name,ordinal`.
    pub fn read_csv<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csvio::reader(reader);
        let cols = csvio::columns(&mut rdr, &["name", "ordinal"])?;
        let mut classes = Vec::new();
        for rec in rdr.records() {
            let (rec, line) = csvio::record(rec)?;
            let name = rec.get(cols[0]).unwrap_or("").trim();
            let raw = rec.get(cols[1]).unwrap_or("").trim();
            let ordinal: u32 = raw
                .parse()
                .map_err(|_| Error::parse(line, format!("ordinal '{raw}' is not a positive integer")))?;
            classes.push(TerrainClass::new(name, ordinal, &[]).map_err(|e| Error::parse(line, e.to_string()))?);
        }
        Self::new(classes)
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        let io = |e: csv::Error| Error::Validation(format!("csv write: {e}"));
        w.write_record(["name", "ordinal"]).map_err(io)?;
        for c in &self.classes {
            w.write_record([c.name.as_str(), &c.ordinal.to_string()]).map_err(io)?;
        }
        w.flush().map_err(|e| Error::io("<csv>", e))
    }
}

impl Default for TerrainScale {
    fn default() -> Self {
        default_terrain_scale()
    }
}

/// Built-in ordering, from flat asphalt to deep snow on steep slopes.
pub fn default_terrain_scale() -> TerrainScale {
    let table: [(&str, &[&str]); 8] = [
        ("asphalt/tile", &["flat", "hard", "high friction"]),
        ("grass", &["flat", "firm", "moderate friction"]),
        ("gravel", &["loose", "rough", "moderate friction"]),
        ("dirt", &["uneven", "deformable"]),
        ("sand", &["soft soil", "deformable", "sinkage"]),
        ("snow", &["soft", "deformable", "low friction"]),
        ("ice", &["hard", "very low friction"]),
        ("deep snow with slopes", &["steep", "soft", "sinkage", "low friction"]),
    ];
    let classes = table
        .iter()
        .zip(1u32..)
        .map(|((name, desc), ordinal)| TerrainClass::new(*name, ordinal, desc).expect("valid built-in terrain"))
        .collect();
    TerrainScale::new(classes).expect("valid built-in scale")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_lookups() {
        let s = default_terrain_scale();
        assert_eq!(s.lookup("gravel").unwrap().ordinal, 3);
        assert_eq!(s.lookup("asphalt").unwrap().ordinal, 1);
        assert_eq!(s.lookup("Tile").unwrap().ordinal, 1);
        assert_eq!(s.lookup("asphalt/tile").unwrap().ordinal, 1);
        assert_eq!(s.lookup("snow").unwrap().ordinal, 6);
        assert_eq!(s.lookup("ice").unwrap().ordinal, 7);
        assert_eq!(s.lookup("deep_snow_with_slopes").unwrap().ordinal, 8);
        assert!(matches!(s.lookup("lava"), Err(Error::NotFound(_))));
    }

    #[test]
    fn paper_relative_order() {
        let s = default_terrain_scale();
        let o = |n| s.lookup(n).unwrap().ordinal;
        assert!(o("asphalt") < o("sand") && o("sand") < o("deep snow with slopes"));
    }

    #[test]
    fn override_csv() {
        let s = TerrainScale::read_csv("name,ordinal\nice,1\ntile,2\n".as_bytes()).unwrap();
        assert_eq!(s.lookup("ice").unwrap().ordinal, 1);
        assert_eq!(s.lookup("tile").unwrap().ordinal, 2);
        assert!(s.lookup("gravel").is_err());
    }

    #[test]
    fn duplicate_ordinals_rejected() {
        let err = TerrainScale::read_csv("name,ordinal\nice,1\ntile,1\n".as_bytes()).unwrap_err();
        assert!(matches!(err, Error::Validation(_)));
        let err = TerrainScale::read_csv("name,ordinal\nice,0\n".as_bytes()).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }));
    }

    #[test]
    fn ambiguous_synonyms_rejected() {
        let err = TerrainScale::read_csv("name,ordinal\nice/tile,1\ntile,2\n".as_bytes()).unwrap_err();
        assert!(matches!(err, Error::Validation(_)));
    }
}
