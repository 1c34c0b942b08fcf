use std::path::Path;

use serde::Deserialize;

use crate::Exit;

const BUILTIN: &str = include_str!("../envelope.toml");

/// Environment variable naming a replacement envelope file.
pub const ENVELOPE_VAR: &str = "TP_ENVELOPE";

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Envelope {
    pub teleport: TeleportLimits,
    pub zk_run: WidthLimits,
    pub cost_table: WidthLimits,
    pub dme_sweep: DmeLimits,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TeleportLimits {
    pub max_n: usize,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WidthLimits {
    pub max_width: usize,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DmeLimits {
    pub max_n: usize,
}

impl Envelope {
    /// The file named by `TP_ENVELOPE`, else the built-in table.
    pub fn load() -> Result<Self, Exit> {
        match std::env::var_os(ENVELOPE_VAR) {
            Some(path) => Self::from_file(Path::new(&path)),
            None => Self::parse(BUILTIN, "built-in envelope"),
        }
    }

    fn from_file(path: &Path) -> Result<Self, Exit> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Exit::Usage(format!("cannot read envelope {}: {e}", path.display())))?;
        Self::parse(&text, &path.display().to_string())
    }

    fn parse(text: &str, origin: &str) -> Result<Self, Exit> {
        toml::from_str(text).map_err(|e| Exit::Usage(format!("invalid envelope {origin}: {e}")))
    }
}
