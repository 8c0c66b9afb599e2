use std::collections::BTreeMap;

use crate::tensor::digits;
use crate::{Error, Result};

/// A function `{0..domain} → {0..codomain}` on classical strings.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassicalTable {
    domain: usize,
    codomain: usize,
    map: Vec<usize>,
}

impl ClassicalTable {
    pub fn new(codomain: usize, map: Vec<usize>) -> Result<Self> {
        if map.is_empty() || codomain == 0 {
            return Err(Error::Table("empty domain or codomain".into()));
        }
        if let Some(bad) = map.iter().find(|&&v| v >= codomain) {
            return Err(Error::Table(format!("value {bad} outside codomain of size {codomain}")));
        }
        Ok(Self { domain: map.len(), codomain, map })
    }

    pub fn identity(size: usize) -> Self {
        Self { domain: size, codomain: size, map: (0..size).collect() }
    }

    /// Sends everything to a single value.
    pub fn constant(domain: usize) -> Self {
        Self { domain, codomain: 1, map: vec![0; domain] }
    }

    /// Reads `{"<x_1…x_n>": "<index>", …}` where keys are strings of `n`
    /// base-`symbols` digits and values are decimal indices below
    /// `codomain`. The table must cover every string.
    pub fn from_strings(
        entries: &BTreeMap<String, String>,
        symbols: usize,
        copies: usize,
        codomain: usize,
    ) -> Result<Self> {
        if symbols > 10 {
            return Err(Error::Table("string tables support at most 10 symbols".into()));
        }
        let domain = symbols
            .checked_pow(copies as u32)
            .ok_or_else(|| Error::Table("domain too large".into()))?;
        let mut map = vec![usize::MAX; domain];
        for (k, v) in entries {
            if k.chars().count() != copies {
                return Err(Error::Table(format!("key `{k}` should have {copies} symbols")));
            }
            let mut idx = 0usize;
            for ch in k.chars() {
                let d = ch
                    .to_digit(10)
                    .filter(|&d| (d as usize) < symbols)
                    .ok_or_else(|| Error::Table(format!("key `{k}` has a symbol outside 0..{symbols}")))?;
                idx = idx * symbols + d as usize;
            }
            let val: usize = v
                .trim()
                .parse()
                .map_err(|_| Error::Table(format!("value `{v}` for key `{k}` is not an index")))?;
            map[idx] = val;
        }
        if let Some(missing) = map.iter().position(|&v| v == usize::MAX) {
            let key: String = digits(missing, symbols, copies).iter().map(|d| d.to_string()).collect();
            return Err(Error::Table(format!("table is not total: missing `{key}`")));
        }
        Self::new(codomain, map)
    }

    pub fn to_strings(&self, symbols: usize, copies: usize) -> BTreeMap<String, String> {
        (0..self.domain)
            .map(|i| {
                let key: String = digits(i, symbols, copies).iter().map(|d| d.to_string()).collect();
                (key, self.map[i].to_string())
            })
            .collect()
    }

    pub fn domain(&self) -> usize {
        self.domain
    }

    pub fn codomain(&self) -> usize {
        self.codomain
    }

    pub fn apply(&self, x: usize) -> usize {
        self.map[x]
    }

    pub fn is_surjective(&self) -> bool {
        let mut hit = vec![false; self.codomain];
        for &v in &self.map {
            hit[v] = true;
        }
        hit.into_iter().all(|h| h)
    }

    /// Preimages of each value.
    pub fn classes(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.codomain];
        for (x, &v) in self.map.iter().enumerate() {
            out[v].push(x);
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn string_table_parses() {
        let mut e = BTreeMap::new();
        for (k, v) in [("00", "0"), ("01", "1"), ("10", "1"), ("11", "0")] {
            e.insert(k.to_string(), v.to_string());
        }
        let t = ClassicalTable::from_strings(&e, 2, 2, 2).unwrap();
        assert_eq!(t.classes(), vec![vec![0, 3], vec![1, 2]]);
        assert!(t.is_surjective());
        assert_eq!(t.to_strings(2, 2), e);
    }

    #[test]
    fn partial_table_rejected() {
        let mut e = BTreeMap::new();
        e.insert("0".to_string(), "0".to_string());
        assert!(ClassicalTable::from_strings(&e, 2, 1, 1).is_err());
        assert!(!ClassicalTable::new(3, vec![0, 0]).unwrap().is_surjective());
    }
}
