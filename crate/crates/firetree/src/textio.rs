//! Plain-text formats: trees as parent lists and per-trial outcome rows.
//!
//! Tree format:
//!
//! ```text
//! n=5
//! 2 1
//! 3 1
//! 4 2
//! 5 3
//! ```
//!
//! A header `n=<n>` followed by one `child parent` line for each vertex
//! `2..=n`, in any order. Blank lines and lines starting with `#` are
//! ignored.

use std::io::{BufRead, Write};

use firetree_core::{FireOutcome, Tree};

use crate::{Error, Result};

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse { line, message: message.into() }
}

pub fn write_tree<W: Write>(tree: &Tree, mut out: W) -> Result<()> {
    writeln!(out, "n={}", tree.n())?;
    for (i, p) in tree.parents().enumerate() {
        writeln!(out, "{} {}", i + 2, p)?;
    }
    Ok(())
}

pub fn tree_to_string(tree: &Tree) -> String {
    let mut buf = Vec::new();
    write_tree(tree, &mut buf).expect("writing to memory cannot fail");
    String::from_utf8(buf).expect("tree text is ASCII")
}

pub fn read_tree<R: BufRead>(input: R) -> Result<Tree> {
    let mut n: Option<usize> = None;
    let mut parents: Vec<Option<usize>> = Vec::new();
    for (idx, line) in input.lines().enumerate() {
        let line_no = idx + 1;
        let line = line?;
        let text = line.trim();
        if text.is_empty() || text.starts_with('#') {
            continue;
        }
        let Some(size) = n else {
            let value = text
                .strip_prefix("n=")
                .ok_or_else(|| parse_err(line_no, "expected header `n=<n>`"))?;
            let size: usize = value
                .trim()
                .parse()
                .map_err(|_| parse_err(line_no, format!("bad vertex count `{value}`")))?;
            if size == 0 {
                return Err(parse_err(line_no, "a tree needs at least one vertex"));
            }
            n = Some(size);
            parents = vec![None; size.saturating_sub(1)];
            continue;
        };
        let mut fields = text.split_whitespace();
        let (Some(a), Some(b), None) = (fields.next(), fields.next(), fields.next()) else {
            return Err(parse_err(line_no, "expected `child parent`"));
        };
        let number = |s: &str| {
            s.parse::<usize>()
                .map_err(|_| parse_err(line_no, format!("`{s}` is not a vertex label")))
        };
        let (child, parent) = (number(a)?, number(b)?);
        if child < 2 || child > size {
            return Err(parse_err(line_no, format!("child {child} outside 2..={size}")));
        }
        if parent < 1 || parent > size {
            return Err(parse_err(line_no, format!("parent {parent} outside 1..={size}")));
        }
        let slot = &mut parents[child - 2];
        if slot.is_some() {
            return Err(parse_err(line_no, format!("vertex {child} listed twice")));
        }
        *slot = Some(parent);
    }
    if n.is_none() {
        return Err(parse_err(0, "missing header `n=<n>`"));
    }
    let parents: Vec<usize> = parents
        .iter()
        .enumerate()
        .map(|(i, p)| p.ok_or_else(|| parse_err(0, format!("vertex {} has no parent line", i + 2))))
        .collect::<Result<_>>()?;
    Ok(Tree::from_parents(&parents)?)
}

pub fn tree_from_str(text: &str) -> Result<Tree> {
    read_tree(text.as_bytes())
}

/// One CSV row summarising a run of the dynamics.
#[derive(Debug, Clone, PartialEq)]
pub struct OutcomeRow {
    pub trial: usize,
    pub n: usize,
    pub p: f64,
    pub seed: u64,
    pub fireproof: usize,
    pub root_burnt_size: usize,
    pub root_fire_index: Option<usize>,
    pub num_fires: usize,
    pub largest_fireproof: usize,
    /// `θ` of the first `K` fires.
    pub thetas: Vec<usize>,
    /// Sizes of the first `K` burnt blocks.
    pub sizes: Vec<usize>,
}

impl OutcomeRow {
    pub fn new(trial: usize, seed: u64, p: f64, outcome: &FireOutcome, k: usize) -> Self {
        OutcomeRow {
            trial,
            n: outcome.n(),
            p,
            seed,
            fireproof: outcome.fireproof_count,
            root_burnt_size: outcome.root_burnt_size,
            root_fire_index: outcome.root_fire_index,
            num_fires: outcome.num_fires(),
            largest_fireproof: outcome.largest_fireproof_component(),
            thetas: outcome.fires.iter().take(k).map(|f| f.theta).collect(),
            sizes: outcome.fires.iter().take(k).map(|f| f.size).collect(),
        }
    }

    pub fn header(k: usize) -> Vec<String> {
        let mut h: Vec<String> = [
            "trial",
            "n",
            "p",
            "seed",
            "I_n",
            "b0",
            "root_fire_index",
            "num_fires",
            "f1_down",
        ]
        .iter()
        .map(|s| s.to_string())
        .collect();
        h.extend((1..=k).map(|i| format!("theta_{i}")));
        h.extend((1..=k).map(|i| format!("b_{i}")));
        h
    }

    pub fn record(&self, k: usize) -> Vec<String> {
        let mut r = vec![
            self.trial.to_string(),
            self.n.to_string(),
            self.p.to_string(),
            self.seed.to_string(),
            self.fireproof.to_string(),
            self.root_burnt_size.to_string(),
            self.root_fire_index.map(|j| j.to_string()).unwrap_or_default(),
            self.num_fires.to_string(),
            self.largest_fireproof.to_string(),
        ];
        let cell = |v: Option<&usize>| v.map(|x| x.to_string()).unwrap_or_default();
        r.extend((0..k).map(|i| cell(self.thetas.get(i))));
        r.extend((0..k).map(|i| cell(self.sizes.get(i))));
        r
    }

    /// Inverse of [`record`](Self::record).
    pub fn parse(fields: &[String], k: usize) -> Result<Self> {
        if fields.len() != 9 + 2 * k {
            return Err(parse_err(0, format!("expected {} fields, got {}", 9 + 2 * k, fields.len())));
        }
        fn num<T: std::str::FromStr>(s: &str) -> Result<T> {
            s.parse().map_err(|_| parse_err(0, format!("bad number `{s}`")))
        }
        let opt = |s: &str| -> Result<Option<usize>> {
            if s.is_empty() {
                Ok(None)
            } else {
                num(s).map(Some)
            }
        };
        let list = |range: std::ops::Range<usize>| -> Result<Vec<usize>> {
            let mut out = Vec::new();
            for s in &fields[range] {
                match opt(s)? {
                    Some(v) => out.push(v),
                    None => break,
                }
            }
            Ok(out)
        };
        Ok(OutcomeRow {
            trial: num(&fields[0])?,
            n: num(&fields[1])?,
            p: num(&fields[2])?,
            seed: num(&fields[3])?,
            fireproof: num(&fields[4])?,
            root_burnt_size: num(&fields[5])?,
            root_fire_index: opt(&fields[6])?,
            num_fires: num(&fields[7])?,
            largest_fireproof: num(&fields[8])?,
            thetas: list(9..9 + k)?,
            sizes: list(9 + k..9 + 2 * k)?,
        })
    }
}
