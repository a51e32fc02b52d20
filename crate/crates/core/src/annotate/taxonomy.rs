//! Class/sub-class hierarchy and label remapping.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::randomizer::config::ModelEntry;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassEntry {
    pub name: String,
    pub sub_classes: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassTaxonomy {
    pub classes: Vec<ClassEntry>,
}

impl ClassTaxonomy {
    /// Classes and sub-classes in the order they first appear in `models`.
    pub fn from_models(models: &[ModelEntry]) -> ClassTaxonomy {
        let mut classes: Vec<ClassEntry> = Vec::new();
        for m in models {
            let entry = match classes.iter_mut().position(|c| c.name == m.class) {
                Some(i) => &mut classes[i],
                None => {
                    classes.push(ClassEntry {
                        name: m.class.clone(),
                        sub_classes: Vec::new(),
                    });
                    classes.last_mut().expect("just pushed")
                }
            };
            if !entry.sub_classes.contains(&m.sub_class) {
                entry.sub_classes.push(m.sub_class.clone());
            }
        }
        ClassTaxonomy { classes }
    }

    /// Sink, toilet, urinal, bidet and tap with their 21 sub-classes.
    pub fn sub_class_challenge() -> ClassTaxonomy {
        ClassTaxonomy::from_models(&crate::randomizer::config::sub_class_models(true))
    }

    pub fn class_names(&self) -> Vec<&str> {
        self.classes.iter().map(|c| c.name.as_str()).collect()
    }

    pub fn sub_class_count(&self) -> usize {
        self.classes.iter().map(|c| c.sub_classes.len()).sum()
    }

    pub fn contains_class(&self, class: &str) -> bool {
        self.classes.iter().any(|c| c.name == class)
    }

    /// Whether `sub_class` belongs to `class`.
    pub fn is_consistent(&self, class: &str, sub_class: &str) -> bool {
        self.classes
            .iter()
            .any(|c| c.name == class && c.sub_classes.iter().any(|s| s == sub_class))
    }
}

/// Class-name rewrite table.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RemapTable {
    pub map: BTreeMap<String, String>,
}

impl RemapTable {
    /// The table for validating against photographs labeled only as sinks
    /// and toilets.
    pub fn external_validation() -> RemapTable {
        let map = [
            ("sink", "sink"),
            ("small_sink", "sink"),
            ("large_sink", "sink"),
            ("double_sink", "sink"),
            ("toilet", "toilet"),
            ("urinal", "toilet"),
            ("bidet", "toilet"),
        ]
        .into_iter()
        .map(|(a, b)| (a.to_string(), b.to_string()))
        .collect();
        RemapTable { map }
    }

    pub fn identity<'a>(classes: impl IntoIterator<Item = &'a str>) -> RemapTable {
        RemapTable {
            map: classes.into_iter().map(|c| (c.to_string(), c.to_string())).collect(),
        }
    }

    /// JSON object mapping source class to target class.
    pub fn load(path: &Path) -> Result<RemapTable> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| Error::parse(path, e))
    }

    pub fn targets(&self) -> BTreeSet<&str> {
        self.map.values().map(String::as_str).collect()
    }

    /// Rewrite one label; unknown labels are an error.
    pub fn apply(&self, class: &str) -> Result<&str> {
        self.map
            .get(class)
            .map(String::as_str)
            .ok_or_else(|| Error::UnmappedLabel(vec![class.to_string()]))
    }

    /// Labels in `classes` that the table does not cover, sorted and deduplicated.
    pub fn unmapped<'a>(&self, classes: impl IntoIterator<Item = &'a str>) -> Vec<String> {
        let set: BTreeSet<&str> = classes.into_iter().filter(|c| !self.map.contains_key(*c)).collect();
        set.into_iter().map(String::from).collect()
    }
}
