//! Toolchain and intrinsics-usage recommendation.
//!
//! A fixed decision walk per device class, assuming the most aggressive
//! optimisation level is used (O2 for MSVC++, O3 otherwise):
//!
//! ```text
//! Windows (x86-64): ICC?    -> ICC, without intrinsic
//!                   MSVC++? -> MSVC++, with intrinsics wherever it is needed
//!                   GCC?    -> GCC, with intrinsics for condition branches
//!                   else    -> ?
//! Linux (x86-64):   GCC?    -> GCC, without intrinsic
//!                   else    -> ?
//! macOS (ARM64):    Clang?  -> Clang, without intrinsic
//!                   GCC?    -> GCC, with intrinsics for condition branches
//!                   else    -> ?
//! Other device:     ?
//! ```
//!
//! `?` is reported as `unknown`; the advisor does not guess beyond the
//! measured configurations. It is advice only and never changes how the
//! harness runs.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AdvisorParseError {
    #[error("unknown device '{0}' (expected windows, linux, macos or other)")]
    Device(String),
    #[error("unknown toolchain '{0}' (expected icc, msvc, gcc or clang, or an alias)")]
    Toolchain(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DeviceClass {
    WindowsX86_64,
    LinuxX86_64,
    MacosArm64,
    Other,
}

impl DeviceClass {
    pub const ALL: [DeviceClass; 4] = [
        DeviceClass::WindowsX86_64,
        DeviceClass::LinuxX86_64,
        DeviceClass::MacosArm64,
        DeviceClass::Other,
    ];

    pub fn label(self) -> &'static str {
        match self {
            DeviceClass::WindowsX86_64 => "Windows (x86-64)",
            DeviceClass::LinuxX86_64 => "Linux (x86-64)",
            DeviceClass::MacosArm64 => "macOS (ARM64)",
            DeviceClass::Other => "Other device",
        }
    }

    /// Toolchains consulted for this device, highest priority first.
    pub fn priority(self) -> &'static [Toolchain] {
        match self {
            DeviceClass::WindowsX86_64 => &[Toolchain::Icc, Toolchain::Msvc, Toolchain::Gcc],
            DeviceClass::LinuxX86_64 => &[Toolchain::Gcc],
            DeviceClass::MacosArm64 => &[Toolchain::Clang, Toolchain::Gcc],
            DeviceClass::Other => &[],
        }
    }
}

impl FromStr for DeviceClass {
    type Err = AdvisorParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let key: String = s
            .trim()
            .to_ascii_lowercase()
            .chars()
            .filter(|c| c.is_ascii_alphanumeric())
            .collect();
        match key.as_str() {
            "windows" | "win" | "windowsx8664" | "winx8664" => Ok(DeviceClass::WindowsX86_64),
            "linux" | "lin" | "linuxx8664" | "linx8664" => Ok(DeviceClass::LinuxX86_64),
            "macos" | "mac" | "macosarm64" | "macarm64" | "darwin" => Ok(DeviceClass::MacosArm64),
            "other" | "oth" | "otherdevice" => Ok(DeviceClass::Other),
            _ => Err(AdvisorParseError::Device(s.to_string())),
        }
    }
}

impl fmt::Display for DeviceClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Compiler family named by the decision walk.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Toolchain {
    #[serde(rename = "ICC")]
    Icc,
    #[serde(rename = "MSVC++")]
    Msvc,
    #[serde(rename = "GCC")]
    Gcc,
    #[serde(rename = "Clang")]
    Clang,
}

/// Case-insensitive alias table.
const ALIASES: &[(&str, Toolchain)] = &[
    ("icc", Toolchain::Icc),
    ("icx", Toolchain::Icc),
    ("icpc", Toolchain::Icc),
    ("icpx", Toolchain::Icc),
    ("intel", Toolchain::Icc),
    ("msvc", Toolchain::Msvc),
    ("msvc++", Toolchain::Msvc),
    ("cl", Toolchain::Msvc),
    ("cl.exe", Toolchain::Msvc),
    ("gcc", Toolchain::Gcc),
    ("g++", Toolchain::Gcc),
    ("gnu", Toolchain::Gcc),
    ("clang", Toolchain::Clang),
    ("clang++", Toolchain::Clang),
    ("apple-clang", Toolchain::Clang),
];

impl Toolchain {
    pub const ALL: [Toolchain; 4] = [
        Toolchain::Icc,
        Toolchain::Msvc,
        Toolchain::Gcc,
        Toolchain::Clang,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Toolchain::Icc => "ICC",
            Toolchain::Msvc => "MSVC++",
            Toolchain::Gcc => "GCC",
            Toolchain::Clang => "Clang",
        }
    }

    pub fn from_alias(name: &str) -> Option<Toolchain> {
        let key = name.trim().to_ascii_lowercase();
        ALIASES
            .iter()
            .find(|(alias, _)| *alias == key)
            .map(|&(_, t)| t)
    }
}

impl FromStr for Toolchain {
    type Err = AdvisorParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Toolchain::from_alias(s).ok_or_else(|| AdvisorParseError::Toolchain(s.to_string()))
    }
}

impl fmt::Display for Toolchain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Parses a comma-separated toolchain list such as `icc,msvc`.
pub fn parse_toolchains(s: &str) -> Result<BTreeSet<Toolchain>, AdvisorParseError> {
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(str::parse)
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum IntrinsicsPolicy {
    None,
    WhereverNeeded,
    ConditionBranchesOnly,
    Unknown,
}

impl IntrinsicsPolicy {
    pub fn phrase(self) -> &'static str {
        match self {
            IntrinsicsPolicy::None => "without intrinsic.",
            IntrinsicsPolicy::WhereverNeeded => "with intrinsics wherever it is needed.",
            IntrinsicsPolicy::ConditionBranchesOnly => "with intrinsics for condition branches.",
            IntrinsicsPolicy::Unknown => "unknown",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Recommendation {
    /// `None` when the walk ends on an unknown terminal.
    pub toolchain: Option<Toolchain>,
    pub intrinsics_policy: IntrinsicsPolicy,
    pub rationale: String,
}

impl Recommendation {
    fn unknown(rationale: String) -> Self {
        Recommendation {
            toolchain: None,
            intrinsics_policy: IntrinsicsPolicy::Unknown,
            rationale,
        }
    }

    pub fn is_unknown(&self) -> bool {
        self.toolchain.is_none()
    }

    pub fn toolchain_name(&self) -> &'static str {
        self.toolchain.map_or("unknown", Toolchain::name)
    }

    /// The terminal node text, e.g. `Use ICC, without intrinsic.`
    pub fn node_text(&self) -> String {
        match self.toolchain {
            Some(t) => format!("Use {}, {}", t.name(), self.intrinsics_policy.phrase()),
            None => "unknown".to_string(),
        }
    }
}

impl fmt::Display for Recommendation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.node_text())
    }
}

fn policy_for(device: DeviceClass, toolchain: Toolchain) -> IntrinsicsPolicy {
    match (device, toolchain) {
        (DeviceClass::WindowsX86_64, Toolchain::Icc) => IntrinsicsPolicy::None,
        (DeviceClass::WindowsX86_64, Toolchain::Msvc) => IntrinsicsPolicy::WhereverNeeded,
        (DeviceClass::WindowsX86_64, Toolchain::Gcc) => IntrinsicsPolicy::ConditionBranchesOnly,
        (DeviceClass::LinuxX86_64, Toolchain::Gcc) => IntrinsicsPolicy::None,
        (DeviceClass::MacosArm64, Toolchain::Clang) => IntrinsicsPolicy::None,
        (DeviceClass::MacosArm64, Toolchain::Gcc) => IntrinsicsPolicy::ConditionBranchesOnly,
        _ => IntrinsicsPolicy::Unknown,
    }
}

/// Walks the decision chart for `device` given the declared toolchains.
pub fn advise(device: DeviceClass, available: &BTreeSet<Toolchain>) -> Recommendation {
    let mut asked = Vec::new();
    for &toolchain in device.priority() {
        if available.contains(&toolchain) {
            let mut rationale = format!("{}: ", device.label());
            for t in &asked {
                rationale.push_str(&format!("{t} available? no; "));
            }
            rationale.push_str(&format!("{toolchain} available? yes"));
            return Recommendation {
                toolchain: Some(toolchain),
                intrinsics_policy: policy_for(device, toolchain),
                rationale,
            };
        }
        asked.push(toolchain);
    }
    let rationale = if asked.is_empty() {
        format!(
            "{}: no measured configuration, outcome unknown",
            device.label()
        )
    } else {
        let names: Vec<_> = asked.iter().map(|t| t.name()).collect();
        format!(
            "{}: none of {} available, outcome unknown",
            device.label(),
            names.join(", ")
        )
    };
    Recommendation::unknown(rationale)
}
