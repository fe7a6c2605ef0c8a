use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::residue::{Doubled, ResidueSet};

use super::ntt::NttKernel;

/// A way of computing the full vector `b -> Δ_A(b)`.
pub trait ProfileKernel: Send + Sync {
    fn name(&self) -> &'static str;

    /// `out[b] = |(A + b) \ A|` for `b` in `0..p`.
    fn deltas(&self, set: &ResidueSet) -> Vec<u32>;
}

/// `p` independent membership scans, `O(p |A|)`.
pub struct NaiveKernel;

impl ProfileKernel for NaiveKernel {
    fn name(&self) -> &'static str {
        "naive"
    }

    fn deltas(&self, set: &ResidueSet) -> Vec<u32> {
        (0..set.p()).map(|b| super::delta(set, b)).collect()
    }
}

/// Rotate the membership vector and popcount `(A + b) & !A`, `O(p^2 / 64)`.
pub struct BitshiftKernel;

impl ProfileKernel for BitshiftKernel {
    fn name(&self) -> &'static str {
        "bitshift"
    }

    fn deltas(&self, set: &ResidueSet) -> Vec<u32> {
        let p = set.p();
        let base = set.words();
        let doubled = Doubled::new(set);
        let mut shifted = vec![0u64; base.len()];
        let mut out = Vec::with_capacity(p as usize);
        out.push(0);
        for b in 1..p {
            doubled.rotate_into(b, &mut shifted);
            let moved: u32 = shifted
                .iter()
                .zip(base)
                .map(|(s, a)| (s & !a).count_ones())
                .sum();
            out.push(moved);
        }
        out
    }
}

/// Backend selector. `Auto` resolves by modulus size.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProfileBackend {
    Naive,
    Bitshift,
    Ntt,
    #[default]
    Auto,
}

impl ProfileBackend {
    pub fn resolve(self, p: u64) -> ProfileBackend {
        match self {
            ProfileBackend::Auto if p < 64 => ProfileBackend::Naive,
            ProfileBackend::Auto if p < 1 << 15 => ProfileBackend::Bitshift,
            ProfileBackend::Auto => ProfileBackend::Ntt,
            other => other,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            ProfileBackend::Naive => "naive",
            ProfileBackend::Bitshift => "bitshift",
            ProfileBackend::Ntt => "ntt",
            ProfileBackend::Auto => "auto",
        }
    }
}

impl fmt::Display for ProfileBackend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ProfileBackend {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self, Error> {
        match s {
            "naive" => Ok(Self::Naive),
            "bitshift" => Ok(Self::Bitshift),
            "ntt" => Ok(Self::Ntt),
            "auto" => Ok(Self::Auto),
            _ => Err(Error::Parse(format!("unknown backend {s:?}"))),
        }
    }
}

/// Name-indexed collection of profile kernels.
pub struct KernelRegistry {
    kernels: Vec<Box<dyn ProfileKernel>>,
}

impl KernelRegistry {
    pub fn empty() -> Self {
        Self {
            kernels: Vec::new(),
        }
    }

    pub fn with_builtin() -> Self {
        let mut reg = Self::empty();
        reg.register(Box::new(NaiveKernel));
        reg.register(Box::new(BitshiftKernel));
        reg.register(Box::new(NttKernel));
        reg
    }

    /// The process-wide registry of built-in kernels.
    pub fn builtin() -> &'static KernelRegistry {
        static REGISTRY: OnceLock<KernelRegistry> = OnceLock::new();
        REGISTRY.get_or_init(KernelRegistry::with_builtin)
    }

    /// Registering a name twice replaces the earlier kernel.
    pub fn register(&mut self, kernel: Box<dyn ProfileKernel>) {
        self.kernels.retain(|k| k.name() != kernel.name());
        self.kernels.push(kernel);
    }

    pub fn get(&self, name: &str) -> Option<&dyn ProfileKernel> {
        self.kernels
            .iter()
            .find(|k| k.name() == name)
            .map(|k| k.as_ref())
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.kernels.iter().map(|k| k.name()).collect()
    }

    pub fn for_backend(&self, backend: ProfileBackend, p: u64) -> &dyn ProfileKernel {
        let name = backend.resolve(p).name();
        self.get(name)
            .unwrap_or_else(|| panic!("no kernel registered under {name:?}"))
    }
}
