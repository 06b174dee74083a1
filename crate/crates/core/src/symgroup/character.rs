//! Irreducible characters of `S_d` by the Murnaghan–Nakayama rule on beta-sets.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use super::partition::{partitions, CycleType};
use crate::error::{Error, Result};

type Memo = HashMap<(Vec<usize>, Vec<usize>), i64>;

fn memo() -> &'static Mutex<Memo> {
    static MEMO: OnceLock<Mutex<Memo>> = OnceLock::new();
    MEMO.get_or_init(|| Mutex::new(HashMap::new()))
}

/// `χ^λ(ρ)`: the irreducible character labelled by `shape` on the class `class`.
pub fn character(shape: &CycleType, class: &CycleType) -> Result<i64> {
    if shape.size() != class.size() {
        return Err(Error::LengthMismatch {
            what: "class size",
            got: class.size(),
            expected: shape.size(),
        });
    }
    Ok(mn(shape.parts(), class.parts()))
}

fn mn(shape: &[usize], class: &[usize]) -> i64 {
    if class.is_empty() {
        return 1;
    }
    let key = (shape.to_vec(), class.to_vec());
    if let Some(&v) = memo().lock().unwrap().get(&key) {
        return v;
    }
    let r = class[0];
    let rest = &class[1..];
    let len = shape.len();
    // beta numbers b_t = λ_t + (ℓ - 1 - t), strictly decreasing
    let beta: Vec<usize> = shape.iter().enumerate().map(|(t, &p)| p + len - 1 - t).collect();
    let mut total = 0i64;
    for (t, &b) in beta.iter().enumerate() {
        if b < r || beta.contains(&(b - r)) {
            continue;
        }
        let target = b - r;
        let height = beta.iter().filter(|&&x| x > target && x < b).count();
        let mut moved = beta.clone();
        moved[t] = target;
        moved.sort_unstable_by(|a, b| b.cmp(a));
        let n = moved.len();
        let smaller: Vec<usize> = moved
            .iter()
            .enumerate()
            .map(|(s, &x)| x - (n - 1 - s))
            .filter(|&p| p > 0)
            .collect();
        let sign = if height % 2 == 0 { 1 } else { -1 };
        total += sign * mn(&smaller, rest);
    }
    memo().lock().unwrap().insert(key, total);
    total
}

/// Full character table of `S_d`; rows are shapes, columns classes, both in the order of
/// [`partitions`].
#[derive(Debug, Clone)]
pub struct CharacterTable {
    pub degree: usize,
    pub partitions: Vec<CycleType>,
    values: Vec<Vec<i64>>,
}

impl CharacterTable {
    pub fn new(d: usize) -> Self {
        let parts = partitions(d);
        let values = parts
            .iter()
            .map(|shape| parts.iter().map(|class| mn(shape.parts(), class.parts())).collect())
            .collect();
        CharacterTable { degree: d, partitions: parts, values }
    }

    /// Shared, lazily built table for degree `d`.
    pub fn cached(d: usize) -> Arc<CharacterTable> {
        static CACHE: OnceLock<Mutex<HashMap<usize, Arc<CharacterTable>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        if let Some(t) = cache.lock().unwrap().get(&d) {
            return t.clone();
        }
        let table = Arc::new(CharacterTable::new(d));
        cache.lock().unwrap().entry(d).or_insert(table).clone()
    }

    pub fn value(&self, shape: usize, class: usize) -> i64 {
        self.values[shape][class]
    }

    pub fn class_index(&self, class: &CycleType) -> Option<usize> {
        self.partitions.iter().position(|p| p == class)
    }
}
