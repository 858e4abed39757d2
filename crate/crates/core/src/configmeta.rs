//! Host and toolchain description attached to every report.
//!
//! Configurations are named `<os>_<toolchain>`, e.g. `lin_gcc` or
//! `mac_clang`. The optimisation level cannot be read back from a compiled
//! binary reliably, so it comes from the build script (cargo's `OPT_LEVEL`)
//! unless overridden.

use std::fmt;
use std::str::FromStr;

use serde::de::{self, Deserializer};
use serde::{Deserialize, Serialize, Serializer};

pub const UNKNOWN: &str = "unknown";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OsFamily {
    Linux,
    Macos,
    Windows,
    Other,
}

impl OsFamily {
    pub fn from_target_os(os: &str) -> OsFamily {
        match os {
            "linux" => OsFamily::Linux,
            "macos" => OsFamily::Macos,
            "windows" => OsFamily::Windows,
            _ => OsFamily::Other,
        }
    }

    pub fn prefix(self) -> &'static str {
        match self {
            OsFamily::Linux => "lin",
            OsFamily::Macos => "mac",
            OsFamily::Windows => "win",
            OsFamily::Other => "oth",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Architecture {
    #[serde(rename = "x86-64")]
    X86_64,
    #[serde(rename = "arm64")]
    Arm64,
    #[serde(rename = "other")]
    Other,
}

impl Architecture {
    pub fn from_target_arch(arch: &str) -> Architecture {
        match arch {
            "x86_64" => Architecture::X86_64,
            "aarch64" => Architecture::Arm64,
            _ => Architecture::Other,
        }
    }
}

/// Compiler optimisation level. `Od` (MSVC / ICC) parses as `O0`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum OptLevel {
    O0,
    O1,
    O2,
    O3,
    Other(String),
}

impl OptLevel {
    /// Maps cargo's `OPT_LEVEL` values (`0`-`3`, `s`, `z`).
    pub fn from_cargo(level: &str) -> OptLevel {
        match level {
            "0" => OptLevel::O0,
            "1" => OptLevel::O1,
            "2" => OptLevel::O2,
            "3" => OptLevel::O3,
            other => OptLevel::Other(other.to_string()),
        }
    }

    pub fn build_default() -> OptLevel {
        OptLevel::from_cargo(env!("VECBENCH_OPT_LEVEL"))
    }
}

impl FromStr for OptLevel {
    type Err = std::convert::Infallible;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if let Some(rest) = s.strip_prefix("other:") {
            return Ok(OptLevel::Other(rest.to_string()));
        }
        let t = s.trim();
        let stripped = t
            .strip_prefix(['O', 'o', '-', '/'])
            .map(|r| r.strip_prefix(['O', 'o']).unwrap_or(r))
            .unwrap_or(t);
        Ok(match stripped {
            "0" | "d" | "D" => OptLevel::O0,
            "1" => OptLevel::O1,
            "2" => OptLevel::O2,
            "3" => OptLevel::O3,
            _ => OptLevel::Other(t.to_string()),
        })
    }
}

impl fmt::Display for OptLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OptLevel::O0 => f.write_str("O0"),
            OptLevel::O1 => f.write_str("O1"),
            OptLevel::O2 => f.write_str("O2"),
            OptLevel::O3 => f.write_str("O3"),
            OptLevel::Other(s) => write!(f, "other:{s}"),
        }
    }
}

impl Serialize for OptLevel {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for OptLevel {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(|e: std::convert::Infallible| match e {})
    }
}

/// A number probed from the host, or `"unknown"` when probing failed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Probed {
    Known(u64),
    Unknown,
}

impl Probed {
    pub fn known(self) -> Option<u64> {
        match self {
            Probed::Known(v) => Some(v),
            Probed::Unknown => None,
        }
    }
}

impl fmt::Display for Probed {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Probed::Known(v) => write!(f, "{v}"),
            Probed::Unknown => f.write_str(UNKNOWN),
        }
    }
}

impl Serialize for Probed {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Probed::Known(v) => s.serialize_u64(*v),
            Probed::Unknown => s.serialize_str(UNKNOWN),
        }
    }
}

impl<'de> Deserialize<'de> for Probed {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct V;
        impl de::Visitor<'_> for V {
            type Value = Probed;
            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a positive integer or \"unknown\"")
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> Result<Probed, E> {
                if v == 0 {
                    return Err(E::custom("probed quantity must be positive"));
                }
                Ok(Probed::Known(v))
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> Result<Probed, E> {
                u64::try_from(v)
                    .map_err(|_| E::custom("probed quantity must be positive"))
                    .and_then(|v| self.visit_u64(v))
            }
            fn visit_str<E: de::Error>(self, v: &str) -> Result<Probed, E> {
                if v == UNKNOWN {
                    Ok(Probed::Unknown)
                } else {
                    Err(E::invalid_value(de::Unexpected::Str(v), &self))
                }
            }
        }
        d.deserialize_any(V)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfigMetadata {
    pub os_family: OsFamily,
    pub os_version: String,
    pub architecture: Architecture,
    pub cpu_model: String,
    pub core_count: Probed,
    pub memory_bytes: Probed,
    pub toolchain_name: String,
    pub toolchain_version: String,
    pub opt_level: OptLevel,
    pub config_name: String,
}

/// `<os-prefix>_<lowercased toolchain>`.
pub fn config_name(os: OsFamily, toolchain_name: &str) -> String {
    format!("{}_{}", os.prefix(), toolchain_name.trim().to_lowercase())
}

impl ConfigMetadata {
    /// Builds metadata from explicit parts; `config_name` is derived.
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        os_family: OsFamily,
        os_version: impl Into<String>,
        architecture: Architecture,
        cpu_model: impl Into<String>,
        core_count: Probed,
        memory_bytes: Probed,
        toolchain_name: impl Into<String>,
        toolchain_version: impl Into<String>,
        opt_level: OptLevel,
    ) -> Self {
        let toolchain_name = non_empty(toolchain_name.into());
        ConfigMetadata {
            config_name: config_name(os_family, &toolchain_name),
            os_family,
            os_version: non_empty(os_version.into()),
            architecture,
            cpu_model: non_empty(cpu_model.into()),
            core_count,
            memory_bytes,
            toolchain_name,
            toolchain_version: non_empty(toolchain_version.into()),
            opt_level,
        }
    }

    /// Replaces the toolchain name and re-derives `config_name`.
    pub fn with_toolchain(mut self, name: &str, version: Option<&str>) -> Self {
        self.toolchain_name = non_empty(name.to_string());
        if let Some(v) = version {
            self.toolchain_version = non_empty(v.to_string());
        }
        self.config_name = config_name(self.os_family, &self.toolchain_name);
        self
    }

    pub fn with_opt_level(mut self, level: OptLevel) -> Self {
        self.opt_level = level;
        self
    }

    /// Checks the derived name still matches its inputs.
    pub fn is_consistent(&self) -> bool {
        self.config_name == config_name(self.os_family, &self.toolchain_name)
    }
}

fn non_empty(s: String) -> String {
    let t = s.trim();
    if t.is_empty() {
        UNKNOWN.to_string()
    } else {
        t.to_string()
    }
}

/// Describes the running host and the toolchain this binary was built with.
/// Never fails; anything that cannot be probed reads `"unknown"`.
pub fn detect() -> ConfigMetadata {
    let rustc = env!("VECBENCH_RUSTC_VERSION");
    let toolchain_version = rustc
        .split_whitespace()
        .nth(1)
        .unwrap_or(UNKNOWN)
        .to_string();
    ConfigMetadata::new(
        OsFamily::from_target_os(std::env::consts::OS),
        probe::os_version(),
        Architecture::from_target_arch(std::env::consts::ARCH),
        probe::cpu_model(),
        std::thread::available_parallelism()
            .map(|n| Probed::Known(n.get() as u64))
            .unwrap_or(Probed::Unknown),
        probe::memory_bytes(),
        "rustc",
        toolchain_version,
        OptLevel::build_default(),
    )
}

mod probe {
    use super::{Probed, UNKNOWN};

    #[cfg(target_os = "linux")]
    pub(super) fn os_version() -> String {
        let kernel = std::fs::read_to_string("/proc/sys/kernel/osrelease")
            .map(|s| s.trim().to_string())
            .ok();
        let pretty = std::fs::read_to_string("/etc/os-release")
            .ok()
            .and_then(|s| {
                s.lines()
                    .find_map(|l| l.strip_prefix("PRETTY_NAME="))
                    .map(|v| v.trim_matches('"').to_string())
            });
        match (pretty, kernel) {
            (Some(p), Some(k)) => format!("{p}, kernel {k}"),
            (None, Some(k)) => format!("kernel {k}"),
            (Some(p), None) => p,
            (None, None) => UNKNOWN.to_string(),
        }
    }

    #[cfg(not(target_os = "linux"))]
    pub(super) fn os_version() -> String {
        UNKNOWN.to_string()
    }

    #[cfg(target_os = "linux")]
    pub(super) fn cpu_model() -> String {
        std::fs::read_to_string("/proc/cpuinfo")
            .ok()
            .and_then(|s| parse_cpu_model(&s))
            .unwrap_or_else(|| UNKNOWN.to_string())
    }

    #[cfg(not(target_os = "linux"))]
    pub(super) fn cpu_model() -> String {
        UNKNOWN.to_string()
    }

    #[cfg(target_os = "linux")]
    pub(super) fn memory_bytes() -> Probed {
        std::fs::read_to_string("/proc/meminfo")
            .ok()
            .and_then(|s| parse_meminfo_total(&s))
            .map_or(Probed::Unknown, Probed::Known)
    }

    #[cfg(not(target_os = "linux"))]
    pub(super) fn memory_bytes() -> Probed {
        Probed::Unknown
    }

    #[cfg_attr(not(target_os = "linux"), allow(dead_code))]
    pub(super) fn parse_cpu_model(cpuinfo: &str) -> Option<String> {
        cpuinfo.lines().find_map(|l| {
            let (key, value) = l.split_once(':')?;
            matches!(key.trim(), "model name" | "Model" | "Hardware")
                .then(|| value.trim().to_string())
                .filter(|v| !v.is_empty())
        })
    }

    #[cfg_attr(not(target_os = "linux"), allow(dead_code))]
    pub(super) fn parse_meminfo_total(meminfo: &str) -> Option<u64> {
        let line = meminfo.lines().find(|l| l.starts_with("MemTotal:"))?;
        let kib: u64 = line.split_whitespace().nth(1)?.parse().ok()?;
        kib.checked_mul(1024).filter(|&b| b > 0)
    }
}
