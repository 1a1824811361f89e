//! Shot-count tables keyed by measured bitstrings.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

/// Measurement outcomes of a shot run: bitstring label → count.
///
/// Labels follow the register convention (qubit 0 is the leftmost bit).
/// Only observed outcomes are stored; absent labels count as zero. The table
/// is ordered, so serialized counts are byte-stable.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counts {
    pub shots: u64,
    pub n_qubits: usize,
    pub table: BTreeMap<String, u64>,
}

impl Counts {
    pub(crate) fn from_index_counts(n_qubits: usize, index_counts: &[u64]) -> Self {
        let mut table = BTreeMap::new();
        let mut shots = 0;
        for (index, &count) in index_counts.iter().enumerate() {
            if count > 0 {
                table.insert(bitstring(index, n_qubits), count);
                shots += count;
            }
        }
        Counts {
            shots,
            n_qubits,
            table,
        }
    }

    /// Count of a bitstring label, zero when never observed.
    pub fn count(&self, label: &str) -> u64 {
        self.table.get(label).copied().unwrap_or(0)
    }

    /// Count of a basis index, zero when never observed.
    pub fn count_index(&self, index: usize) -> u64 {
        self.count(&bitstring(index, self.n_qubits))
    }

    /// Observed frequency of a basis index.
    pub fn frequency(&self, index: usize) -> f64 {
        self.count_index(index) as f64 / self.shots as f64
    }
}

/// Formats a basis index as its ket label (qubit 0 leftmost).
pub fn bitstring(index: usize, n_qubits: usize) -> String {
    format!("{index:0n_qubits$b}")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bitstring_uses_leftmost_qubit_zero() {
        assert_eq!(bitstring(2, 2), "10");
        assert_eq!(bitstring(1, 2), "01");
        assert_eq!(bitstring(5, 4), "0101");
    }

    #[test]
    fn absent_labels_count_zero_and_shots_sum() {
        let counts = Counts::from_index_counts(2, &[340, 350, 0, 334]);
        assert_eq!(counts.shots, 1024);
        assert_eq!(counts.count("10"), 0);
        assert_eq!(counts.count_index(3), 334);
        assert_eq!(counts.table.len(), 3);
        let total: u64 = counts.table.values().sum();
        assert_eq!(total, counts.shots);
    }
}
