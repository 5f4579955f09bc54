//! Process-wide memo of bootstrap KS critical values.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use evlab_core::evt::{bootstrap_critical_value, shape_bucket, CriticalValues};

/// Critical values keyed by `(m, shape bucket)`. Each entry is computed once;
/// concurrent callers asking for the same key wait for the first.
#[derive(Debug, Default)]
pub struct KsTable {
    cells: Mutex<HashMap<(usize, i64), Arc<OnceLock<f64>>>>,
}

impl KsTable {
    pub fn new() -> Self {
        Self::default()
    }

    /// The table shared by everything in this process.
    pub fn global() -> &'static KsTable {
        static TABLE: OnceLock<KsTable> = OnceLock::new();
        TABLE.get_or_init(KsTable::new)
    }

    pub fn len(&self) -> usize {
        self.cells.lock().expect("ks table lock").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

impl CriticalValues for KsTable {
    fn critical_value(&self, m: usize, shape: f64) -> f64 {
        let bucket = shape_bucket(shape);
        let cell = {
            let mut cells = self.cells.lock().expect("ks table lock");
            Arc::clone(cells.entry((m, bucket)).or_default())
        };
        *cell.get_or_init(|| bootstrap_critical_value(m, bucket))
    }
}
