use std::fmt::Write;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

/// Per-cycle signal values. Every column has `len()` entries.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Trace {
    pub columns: IndexMap<String, Vec<u64>>,
    pub widths: IndexMap<String, u32>,
    /// Constants (parameters) visible to assertions; not exported as columns.
    #[serde(default, skip_serializing_if = "IndexMap::is_empty")]
    pub constants: IndexMap<String, u64>,
    length: usize,
}

impl Trace {
    pub fn new() -> Trace {
        Trace::default()
    }

    pub fn len(&self) -> usize {
        self.length
    }

    pub fn is_empty(&self) -> bool {
        self.length == 0
    }

    pub fn add_column(&mut self, name: &str, width: u32) {
        assert_eq!(self.length, 0, "columns must be added before rows");
        self.columns.insert(name.to_string(), Vec::new());
        self.widths.insert(name.to_string(), width);
    }

    /// Appends one cycle; `values` are in column order.
    pub fn push_row(&mut self, values: &[u64]) {
        assert_eq!(values.len(), self.columns.len(), "row width mismatch");
        for (col, &v) in self.columns.values_mut().zip(values) {
            col.push(v);
        }
        self.length += 1;
    }

    pub fn column(&self, name: &str) -> Option<&[u64]> {
        self.columns.get(name).map(Vec::as_slice)
    }

    /// First `n` cycles.
    pub fn truncated(&self, n: usize) -> Trace {
        let n = n.min(self.length);
        Trace {
            columns: self.columns.iter().map(|(k, v)| (k.clone(), v[..n].to_vec())).collect(),
            widths: self.widths.clone(),
            constants: self.constants.clone(),
            length: n,
        }
    }

    /// CSV with a header row of names and one row per cycle.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("cycle");
        for name in self.columns.keys() {
            out.push(',');
            out.push_str(name);
        }
        out.push('\n');
        for t in 0..self.length {
            let _ = write!(out, "{t}");
            for col in self.columns.values() {
                let _ = write!(out, ",{}", col[t]);
            }
            out.push('\n');
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_shape() {
        let mut t = Trace::new();
        t.add_column("a", 1);
        t.add_column("q", 4);
        t.push_row(&[1, 9]);
        t.push_row(&[0, 10]);
        assert_eq!(t.to_csv(), "cycle,a,q\n0,1,9\n1,0,10\n");
        assert_eq!(t.truncated(1).len(), 1);
        let back: Trace = serde_json::from_str(&serde_json::to_string(&t).unwrap()).unwrap();
        assert_eq!(back, t);
    }
}
