use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::rng::SplitMix64;
use crate::seqcore::Matrix;

/// One named parameter: value, accumulated gradient, trainable flag.
#[derive(Debug, Clone)]
pub struct ParamEntry {
    pub value: Matrix,
    pub grad: Matrix,
    pub trainable: bool,
}

/// Named collection of parameter matrices with gradient slots.
///
/// Backed by a BTreeMap so iteration order (and therefore every gradient
/// sweep, optimizer step, and serialized weights file) is deterministic.
/// Single-writer: gradient accumulation must not race across threads.
#[derive(Debug, Clone, Default)]
pub struct ParamStore {
    entries: BTreeMap<String, ParamEntry>,
}

impl ParamStore {
    pub fn new() -> Self {
        ParamStore::default()
    }

    pub fn insert(&mut self, name: &str, value: Matrix) {
        let grad = Matrix::zeros(value.rows(), value.cols());
        self.entries
            .insert(name.to_string(), ParamEntry { value, grad, trainable: true });
    }

    pub fn insert_frozen(&mut self, name: &str, value: Matrix) {
        let grad = Matrix::zeros(value.rows(), value.cols());
        self.entries
            .insert(name.to_string(), ParamEntry { value, grad, trainable: false });
    }

    /// Fan-based uniform init in ±sqrt(6/(fan_in+fan_out)), seeded.
    pub fn insert_init(&mut self, name: &str, rows: usize, cols: usize, rng: &mut SplitMix64) {
        let bound = (6.0 / (rows + cols) as f64).sqrt();
        let mut m = Matrix::zeros(rows, cols);
        for v in m.data_mut() {
            *v = rng.uniform(-bound, bound);
        }
        self.insert(name, m);
    }

    pub fn contains(&self, name: &str) -> bool {
        self.entries.contains_key(name)
    }

    pub fn get(&self, name: &str) -> Result<&Matrix> {
        self.entries
            .get(name)
            .map(|e| &e.value)
            .ok_or_else(|| Error::Config(format!("parameter not found: {name}")))
    }

    pub fn get_mut(&mut self, name: &str) -> Result<&mut Matrix> {
        self.entries
            .get_mut(name)
            .map(|e| &mut e.value)
            .ok_or_else(|| Error::Config(format!("parameter not found: {name}")))
    }

    pub fn entry(&self, name: &str) -> Result<&ParamEntry> {
        self.entries
            .get(name)
            .ok_or_else(|| Error::Config(format!("parameter not found: {name}")))
    }

    /// Accumulate into the gradient slot of `name`.
    pub fn accumulate_grad(&mut self, name: &str, delta: &Matrix) -> Result<()> {
        let entry = self
            .entries
            .get_mut(name)
            .ok_or_else(|| Error::Config(format!("parameter not found: {name}")))?;
        entry.grad.add_assign(delta).map_err(|_| {
            Error::Dimension(format!(
                "gradient for {name}: value {}x{} vs delta {}x{}",
                entry.value.rows(),
                entry.value.cols(),
                delta.rows(),
                delta.cols()
            ))
        })
    }

    pub fn grad(&self, name: &str) -> Result<&Matrix> {
        self.entries
            .get(name)
            .map(|e| &e.grad)
            .ok_or_else(|| Error::Config(format!("parameter not found: {name}")))
    }

    pub fn zero_grads(&mut self) {
        for e in self.entries.values_mut() {
            e.grad.fill(0.0);
        }
    }

    /// Names in deterministic (lexicographic) order.
    pub fn names(&self) -> Vec<String> {
        self.entries.keys().cloned().collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&String, &ParamEntry)> {
        self.entries.iter()
    }

    pub fn iter_mut(&mut self) -> impl Iterator<Item = (&String, &mut ParamEntry)> {
        self.entries.iter_mut()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Total scalar count over trainable entries.
    pub fn trainable_scalars(&self) -> usize {
        self.entries
            .values()
            .filter(|e| e.trainable)
            .map(|e| e.value.rows() * e.value.cols())
            .sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn init_respects_fan_bound() {
        let mut rng = SplitMix64::new(1);
        let mut store = ParamStore::new();
        store.insert_init("w", 8, 16, &mut rng);
        let bound = (6.0 / 24.0f64).sqrt();
        for &v in store.get("w").unwrap().data() {
            assert!(v.abs() <= bound);
        }
    }

    #[test]
    fn grad_accumulates() {
        let mut store = ParamStore::new();
        store.insert("w", Matrix::zeros(2, 2));
        let g = Matrix::from_rows(&[vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        store.accumulate_grad("w", &g).unwrap();
        store.accumulate_grad("w", &g).unwrap();
        assert_eq!(store.grad("w").unwrap().get(0, 0), 2.0);
        store.zero_grads();
        assert_eq!(store.grad("w").unwrap().get(0, 0), 0.0);
    }

    #[test]
    fn missing_parameter_is_config_error() {
        let store = ParamStore::new();
        assert!(store.get("nope").is_err());
    }
}
