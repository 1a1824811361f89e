//! Gate descriptors for the simulator's fixed gate set.
//!
//! A [`GateOp`] names a gate kind, the qubits it acts on, and an adjoint
//! flag. Every gate has a well-defined inverse: X, Y, Z, H, CNOT and CZ are
//! self-inverse, while S and T invert to their adjoints (written `S'@0`,
//! `T'@1` in descriptor form).

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::QsimError;

/// The supported gate kinds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum GateKind {
    X,
    Y,
    Z,
    H,
    S,
    T,
    Cnot,
    Cz,
}

impl GateKind {
    /// Number of qubit targets the kind takes.
    pub fn arity(self) -> usize {
        match self {
            GateKind::Cnot | GateKind::Cz => 2,
            _ => 1,
        }
    }

    /// True for kinds that are their own inverse.
    pub fn self_inverse(self) -> bool {
        !matches!(self, GateKind::S | GateKind::T)
    }

    fn name(self) -> &'static str {
        match self {
            GateKind::X => "X",
            GateKind::Y => "Y",
            GateKind::Z => "Z",
            GateKind::H => "H",
            GateKind::S => "S",
            GateKind::T => "T",
            GateKind::Cnot => "CNOT",
            GateKind::Cz => "CZ",
        }
    }
}

/// A single gate application: kind, ordered targets, adjoint flag.
///
/// For two-qubit kinds the target order matters: `CNOT@c,t` uses the first
/// index as control and the second as target. The adjoint flag is only
/// meaningful for S and T and is normalized away for self-inverse kinds.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct GateOp {
    kind: GateKind,
    targets: Vec<usize>,
    adjoint: bool,
}

impl GateOp {
    /// Builds a gate op, normalizing the adjoint flag for self-inverse kinds.
    ///
    /// Fails with `InvalidTarget` when the target count does not match the
    /// kind's arity or when two-qubit targets coincide.
    pub fn new(kind: GateKind, targets: Vec<usize>, adjoint: bool) -> Result<Self, QsimError> {
        if targets.len() != kind.arity() {
            return Err(QsimError::InvalidTarget {
                target: targets.len(),
                n_qubits: kind.arity(),
            });
        }
        if kind.arity() == 2 && targets[0] == targets[1] {
            return Err(QsimError::DuplicateTarget(targets[0]));
        }
        Ok(GateOp {
            kind,
            targets,
            adjoint: adjoint && !kind.self_inverse(),
        })
    }

    pub fn x(q: usize) -> Self {
        Self::new(GateKind::X, vec![q], false).unwrap()
    }

    pub fn y(q: usize) -> Self {
        Self::new(GateKind::Y, vec![q], false).unwrap()
    }

    pub fn z(q: usize) -> Self {
        Self::new(GateKind::Z, vec![q], false).unwrap()
    }

    pub fn h(q: usize) -> Self {
        Self::new(GateKind::H, vec![q], false).unwrap()
    }

    pub fn s(q: usize) -> Self {
        Self::new(GateKind::S, vec![q], false).unwrap()
    }

    pub fn t(q: usize) -> Self {
        Self::new(GateKind::T, vec![q], false).unwrap()
    }

    pub fn cnot(control: usize, target: usize) -> Result<Self, QsimError> {
        Self::new(GateKind::Cnot, vec![control, target], false)
    }

    pub fn cz(a: usize, b: usize) -> Result<Self, QsimError> {
        Self::new(GateKind::Cz, vec![a, b], false)
    }

    pub fn kind(&self) -> GateKind {
        self.kind
    }

    pub fn targets(&self) -> &[usize] {
        &self.targets
    }

    pub fn is_adjoint(&self) -> bool {
        self.adjoint
    }

    /// The gate op undoing this one.
    pub fn inverse(&self) -> Self {
        GateOp {
            kind: self.kind,
            targets: self.targets.clone(),
            adjoint: if self.kind.self_inverse() {
                false
            } else {
                !self.adjoint
            },
        }
    }

    /// Largest target index, for register-bound checks.
    pub fn max_target(&self) -> usize {
        *self.targets.iter().max().expect("gate has targets")
    }
}

impl fmt::Display for GateOp {
    /// Descriptor form: `X@0`, `CNOT@0,1`, `S'@0`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.kind.name())?;
        if self.adjoint {
            write!(f, "'")?;
        }
        write!(f, "@")?;
        for (i, t) in self.targets.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{t}")?;
        }
        Ok(())
    }
}

impl FromStr for GateOp {
    type Err = QsimError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (head, tail) = s
            .split_once('@')
            .ok_or_else(|| QsimError::BadGateDescriptor(s.to_string()))?;
        let (name, adjoint) = match head.strip_suffix('\'') {
            Some(base) => (base, true),
            None => (head, false),
        };
        let kind = match name {
            "X" => GateKind::X,
            "Y" => GateKind::Y,
            "Z" => GateKind::Z,
            "H" => GateKind::H,
            "S" => GateKind::S,
            "T" => GateKind::T,
            "CNOT" => GateKind::Cnot,
            "CZ" => GateKind::Cz,
            _ => return Err(QsimError::BadGateDescriptor(s.to_string())),
        };
        let targets = tail
            .split(',')
            .map(|t| t.trim().parse::<usize>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|_| QsimError::BadGateDescriptor(s.to_string()))?;
        GateOp::new(kind, targets, adjoint)
            .map_err(|_| QsimError::BadGateDescriptor(s.to_string()))
    }
}

impl TryFrom<String> for GateOp {
    type Error = QsimError;

    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

impl From<GateOp> for String {
    fn from(g: GateOp) -> String {
        g.to_string()
    }
}
