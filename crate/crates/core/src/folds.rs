use crate::error::{QeError, Result};

/// Assignment of `n` items to `k` contiguous folds whose sizes differ by at
/// most one. Earlier folds take the remainder.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FoldPlan {
    k: usize,
    assignment: Vec<usize>,
}

impl FoldPlan {
    pub fn contiguous(n: usize, k: usize) -> Result<Self> {
        if k < 2 {
            return Err(QeError::Config(format!("need at least 2 folds, got {k}")));
        }
        if n < k {
            return Err(QeError::DegenerateInput(format!(
                "{n} items cannot fill {k} folds"
            )));
        }
        let base = n / k;
        let extra = n % k;
        let mut assignment = Vec::with_capacity(n);
        for f in 0..k {
            let size = base + usize::from(f < extra);
            assignment.extend(std::iter::repeat(f).take(size));
        }
        Ok(FoldPlan { k, assignment })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn len(&self) -> usize {
        self.assignment.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assignment.is_empty()
    }

    pub fn fold_of(&self, item: usize) -> usize {
        self.assignment[item]
    }

    /// (training indices, held-out indices) for fold `f`.
    pub fn split(&self, f: usize) -> (Vec<usize>, Vec<usize>) {
        let mut train = Vec::new();
        let mut held = Vec::new();
        for (i, &a) in self.assignment.iter().enumerate() {
            if a == f {
                held.push(i);
            } else {
                train.push(i);
            }
        }
        (train, held)
    }
}
