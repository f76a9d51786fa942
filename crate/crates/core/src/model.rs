use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Which well-connectedness requirement a 2-club must satisfy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Model {
    /// Every pair joined by `t` internally disjoint paths of length at most two.
    Robust,
    /// Still a 2-club after deleting any `t` vertices.
    Hereditary,
    /// A 2-club whose induced subgraph is `t`-vertex-connected.
    Connected,
}

impl Model {
    pub const ALL: [Model; 3] = [Model::Robust, Model::Hereditary, Model::Connected];

    pub fn name(self) -> &'static str {
        match self {
            Model::Robust => "robust",
            Model::Hereditary => "hereditary",
            Model::Connected => "connected",
        }
    }
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Model {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "robust" | "r" => Ok(Model::Robust),
            "hereditary" | "h" => Ok(Model::Hereditary),
            "connected" | "c" => Ok(Model::Connected),
            other => Err(format!("unknown model `{other}`")),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("{model} 2-clubs need t >= {min}, got {t}")]
pub struct InvalidSpec {
    pub model: Model,
    pub t: u32,
    pub min: u32,
}

/// A model together with its connectivity parameter `t`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ModelSpec {
    model: Model,
    t: u32,
}

impl ModelSpec {
    /// Robust and connected need `t >= 1`; hereditary accepts `t >= 0`.
    pub fn new(model: Model, t: u32) -> Result<Self, InvalidSpec> {
        let min = match model {
            Model::Hereditary => 0,
            Model::Robust | Model::Connected => 1,
        };
        if t < min {
            return Err(InvalidSpec { model, t, min });
        }
        Ok(ModelSpec { model, t })
    }

    pub fn robust(t: u32) -> Self {
        Self::new(Model::Robust, t).expect("robust needs t >= 1")
    }

    pub fn hereditary(t: u32) -> Self {
        Self::new(Model::Hereditary, t).expect("valid")
    }

    pub fn connected(t: u32) -> Self {
        Self::new(Model::Connected, t).expect("connected needs t >= 1")
    }

    pub fn model(self) -> Model {
        self.model
    }

    pub fn t(self) -> u32 {
        self.t
    }

    /// Whether this is the plain 2-club case (`t = 1`, or `t = 0` for hereditary).
    pub fn is_base_case(self) -> bool {
        match self.model {
            Model::Hereditary => self.t == 0,
            Model::Robust | Model::Connected => self.t == 1,
        }
    }

    /// Degree a vertex needs inside any solution, assuming hereditary
    /// solutions are not cliques.
    pub fn min_degree(self) -> usize {
        match self.model {
            Model::Hereditary => self.t as usize + 1,
            Model::Robust | Model::Connected => self.t as usize,
        }
    }

    /// Smallest admissible solution size.
    pub fn min_size(self) -> usize {
        match self.model {
            Model::Hereditary => 1,
            Model::Robust | Model::Connected => self.t as usize + 1,
        }
    }

    /// Common-neighbor threshold for the no-choice marking of a nonadjacent pair.
    pub fn no_choice_threshold(self) -> usize {
        match self.model {
            Model::Robust => self.t as usize,
            Model::Hereditary => self.t as usize + 1,
            Model::Connected => 1,
        }
    }

    /// Compatibility test for the two counting models. Returns `None` for
    /// the connected model, which needs a path count.
    pub fn counting_compatible(self, adjacent: bool, common: usize) -> Option<bool> {
        let t = self.t as usize;
        match self.model {
            Model::Robust => Some(if adjacent { common + 1 >= t } else { common >= t }),
            Model::Hereditary => Some(adjacent || common > t),
            Model::Connected => None,
        }
    }
}

impl fmt::Display for ModelSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}-{}", self.t, self.model)
    }
}
