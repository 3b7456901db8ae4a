//! Class-to-channel rules for feature tiles.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One class entry: either a bare red value or red plus a display colour hint
/// for viewers (the tile itself only ever carries the red value).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ClassStyle {
    Red(u8),
    Full {
        red: u8,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        color: Option<String>,
    },
}

impl ClassStyle {
    pub fn red(&self) -> u8 {
        match *self {
            ClassStyle::Red(r) => r,
            ClassStyle::Full { red, .. } => red,
        }
    }
}

fn default_fallback() -> u8 {
    255
}

/// Maps class codes to red channel values; red 0 is reserved for "no class".
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct LayerStyle {
    #[serde(default)]
    pub classes: BTreeMap<String, ClassStyle>,
    /// Red value for classes not listed.
    #[serde(default = "default_fallback")]
    pub fallback_red: u8,
}

impl Default for LayerStyle {
    fn default() -> Self {
        LayerStyle { classes: BTreeMap::new(), fallback_red: default_fallback() }
    }
}

impl LayerStyle {
    /// Numbers the given classes 1, 2, 3, ... in sorted order.
    pub fn enumerate<'a>(class_codes: impl IntoIterator<Item = &'a str>) -> Result<Self> {
        let mut codes: Vec<&str> = class_codes.into_iter().collect();
        codes.sort_unstable();
        codes.dedup();
        if codes.len() > 255 {
            return Err(Error::Validation(format!("{} classes exceed the 255 red values", codes.len())));
        }
        let classes =
            codes.into_iter().enumerate().map(|(i, c)| (c.to_string(), ClassStyle::Red(i as u8 + 1))).collect();
        Ok(LayerStyle { classes, fallback_red: default_fallback() })
    }

    pub fn validate(&self) -> Result<()> {
        if self.fallback_red == 0 {
            return Err(Error::Validation("fallback red value 0 is reserved".into()));
        }
        if let Some((code, _)) = self.classes.iter().find(|(_, s)| s.red() == 0) {
            return Err(Error::Validation(format!("class {code} uses the reserved red value 0")));
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let style: LayerStyle = serde_json::from_str(text)?;
        style.validate()?;
        Ok(style)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn red(&self, class_code: &str) -> u8 {
        self.classes.get(class_code).map_or(self.fallback_red, ClassStyle::red)
    }
}
