//! Edge-labelled graphs with an explicit vertex order, the Wheeler axioms,
//! and the pattern-matching index built on top of them.
//!
//! A graph is Wheeler under its ranking when
//!
//! 1. vertices without in-edges come before all others;
//! 2. if `u` has an in-edge labelled `a`, `v` one labelled `b`, and `a < b`,
//!    then `u < v`;
//! 3. if `(u, v)` and `(w, x)` carry the same label and `u < w`, then `v <= x`.
//!
//! Ranks are supplied by the input; this module checks them, it does not
//! search for an ordering.

mod index;

use std::collections::BTreeSet;
use std::fmt;

pub use index::{tokenize, GraphStats, IndexSpace, StepTrace, WheelerIndex};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Edge {
    pub origin: usize,
    pub dest: usize,
    pub label: u32,
}

/// Directed edge-labelled multigraph on vertices `1..=n`.
///
/// Labels are dense symbols `0..sigma` indexing a dictionary of tokens kept in
/// lexicographic (byte) order, so symbol order is token order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LabeledGraph {
    n: usize,
    edges: Vec<Edge>,
    labels: Vec<String>,
}

impl LabeledGraph {
    /// Checks ranks and label symbols; `labels` must be sorted and distinct.
    pub fn new(n: usize, edges: Vec<Edge>, labels: Vec<String>) -> Result<Self> {
        if labels.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::invalid("label dictionary must be sorted and distinct"));
        }
        for (k, e) in edges.iter().enumerate() {
            if e.origin < 1 || e.origin > n || e.dest < 1 || e.dest > n {
                return Err(Error::invalid(format!(
                    "edge {} ({} -> {}) has a rank outside [1, {n}]",
                    k + 1,
                    e.origin,
                    e.dest
                )));
            }
            if e.label as usize >= labels.len() {
                return Err(Error::invalid(format!(
                    "edge {} uses label symbol {} outside the alphabet of {}",
                    k + 1,
                    e.label,
                    labels.len()
                )));
            }
        }
        Ok(LabeledGraph { n, edges, labels })
    }

    /// Builds from `(origin, dest, token)` triples, deriving the dictionary.
    pub fn from_edges<S: AsRef<str>>(n: usize, edges: &[(usize, usize, S)]) -> Result<Self> {
        let labels: Vec<String> = edges
            .iter()
            .map(|(_, _, t)| t.as_ref().to_owned())
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        let edges = edges
            .iter()
            .map(|(u, v, t)| Edge {
                origin: *u,
                dest: *v,
                label: labels.binary_search_by(|l| l.as_str().cmp(t.as_ref())).unwrap() as u32,
            })
            .collect();
        Self::new(n, edges, labels)
    }

    /// Parses the text format: a header line `n <count>`, then one `u v label`
    /// line per edge. Blank lines and lines starting with `#` are skipped.
    pub fn parse(text: &str) -> Result<Self> {
        let mut n: Option<usize> = None;
        let mut raw: Vec<(usize, usize, &str)> = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let lineno = lineno + 1;
            let trimmed = line.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = trimmed.split_whitespace().collect();
            let parse_err = |message: String| Error::Parse {
                line: lineno,
                message,
            };
            let Some(count) = n else {
                match fields.as_slice() {
                    ["n", count] => {
                        n = Some(count.parse().map_err(|_| {
                            parse_err(format!("invalid vertex count {count:?}"))
                        })?);
                        continue;
                    }
                    _ => return Err(parse_err("expected header `n <count>`".into())),
                }
            };
            let [u, v, label] = fields.as_slice() else {
                return Err(parse_err(format!(
                    "expected `origin dest label`, found {} fields",
                    fields.len()
                )));
            };
            let rank = |s: &str| -> Result<usize> {
                let r: usize = s
                    .parse()
                    .map_err(|_| parse_err(format!("invalid rank {s:?}")))?;
                if r < 1 || r > count {
                    return Err(parse_err(format!("rank {r} outside [1, {count}]")));
                }
                Ok(r)
            };
            raw.push((rank(u)?, rank(v)?, label));
        }
        let n = n.ok_or(Error::Parse {
            line: text.lines().count().max(1),
            message: "missing header `n <count>`".into(),
        })?;
        Self::from_edges(n, &raw)
    }

    /// Renders the text format accepted by [`parse`](Self::parse).
    pub fn to_text(&self) -> String {
        let mut out = format!("n {}\n", self.n);
        for e in &self.edges {
            out.push_str(&format!(
                "{} {} {}\n",
                e.origin, e.dest, self.labels[e.label as usize]
            ));
        }
        out
    }

    pub fn num_vertices(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn alphabet_size(&self) -> usize {
        self.labels.len()
    }

    pub fn symbol(&self, token: &str) -> Option<u32> {
        self.labels
            .binary_search_by(|l| l.as_str().cmp(token))
            .ok()
            .map(|s| s as u32)
    }

    pub fn out_degrees(&self) -> Vec<u32> {
        let mut d = vec![0u32; self.n];
        for e in &self.edges {
            d[e.origin - 1] += 1;
        }
        d
    }

    pub fn in_degrees(&self) -> Vec<u32> {
        let mut d = vec![0u32; self.n];
        for e in &self.edges {
            d[e.dest - 1] += 1;
        }
        d
    }

    /// The same graph with vertex `v` moved to rank `new_rank[v - 1]`.
    pub fn permute_ranks(&self, new_rank: &[usize]) -> Result<Self> {
        let mut seen = vec![false; self.n];
        if new_rank.len() != self.n
            || !new_rank
                .iter()
                .all(|&r| r >= 1 && r <= self.n && !std::mem::replace(&mut seen[r - 1], true))
        {
            return Err(Error::invalid("rank map must be a permutation of 1..=n"));
        }
        let edges = self
            .edges
            .iter()
            .map(|e| Edge {
                origin: new_rank[e.origin - 1],
                dest: new_rank[e.dest - 1],
                label: e.label,
            })
            .collect();
        Self::new(self.n, edges, self.labels.clone())
    }

    /// The same graph with the ranks of `a` and `b` exchanged.
    pub fn swap_ranks(&self, a: usize, b: usize) -> Result<Self> {
        let mut perm: Vec<usize> = (1..=self.n).collect();
        if a < 1 || a > self.n || b < 1 || b > self.n {
            return Err(Error::invalid("swapped ranks must lie in [1, n]"));
        }
        perm.swap(a - 1, b - 1);
        self.permute_ranks(&perm)
    }

    /// Checks the three axioms in order and reports the first one broken.
    pub fn validate(&self) -> std::result::Result<(), Violation> {
        self.check_sources_first()?;
        self.check_label_order()?;
        self.check_origin_order()
    }

    fn check_sources_first(&self) -> std::result::Result<(), Violation> {
        let din = self.in_degrees();
        let mut last_with_in_edges = None;
        for (p, &d) in din.iter().enumerate() {
            match (d, last_with_in_edges) {
                (0, Some(earlier)) => {
                    return Err(Violation::SourceNotFirst {
                        source: p + 1,
                        earlier,
                    })
                }
                (0, None) => {}
                _ => last_with_in_edges = Some(p + 1),
            }
        }
        Ok(())
    }

    fn check_label_order(&self) -> std::result::Result<(), Violation> {
        // (min, max) in-label per vertex.
        let mut span: Vec<Option<(u32, u32)>> = vec![None; self.n];
        for e in &self.edges {
            let s = &mut span[e.dest - 1];
            *s = Some(match *s {
                None => (e.label, e.label),
                Some((lo, hi)) => (lo.min(e.label), hi.max(e.label)),
            });
        }
        let mut prev: Option<(usize, u32)> = None; // (vertex, its max in-label)
        for (p, s) in span.iter().enumerate() {
            let Some((lo, hi)) = *s else { continue };
            let v = p + 1;
            if lo < hi {
                return Err(self.label_violation(v, lo, v, hi));
            }
            if let Some((pv, pmax)) = prev {
                if lo < pmax {
                    return Err(self.label_violation(v, lo, pv, pmax));
                }
            }
            prev = Some((v, hi));
        }
        Ok(())
    }

    fn label_violation(&self, lower: usize, a: u32, higher: usize, b: u32) -> Violation {
        Violation::LabelOrder {
            vertex: lower,
            label: self.labels[a as usize].clone(),
            other_vertex: higher,
            other_label: self.labels[b as usize].clone(),
        }
    }

    fn check_origin_order(&self) -> std::result::Result<(), Violation> {
        let mut sorted: Vec<&Edge> = self.edges.iter().collect();
        sorted.sort_by_key(|e| (e.label, e.origin, e.dest));
        let mut k = 0;
        while k < sorted.len() {
            let label = sorted[k].label;
            // Edge with the largest destination among strictly smaller origins.
            let mut reach: Option<&Edge> = None;
            while k < sorted.len() && sorted[k].label == label {
                let origin = sorted[k].origin;
                let group_start = k;
                while k < sorted.len() && sorted[k].label == label && sorted[k].origin == origin {
                    k += 1;
                }
                let first = sorted[group_start]; // smallest destination of this origin
                if let Some(r) = reach {
                    if first.dest < r.dest {
                        return Err(Violation::OriginOrder {
                            label: self.labels[label as usize].clone(),
                            first: (r.origin, r.dest),
                            second: (first.origin, first.dest),
                        });
                    }
                }
                let last = sorted[k - 1];
                if reach.is_none_or(|r| last.dest >= r.dest) {
                    reach = Some(last);
                }
            }
        }
        Ok(())
    }
}

/// The first Wheeler axiom a ranking breaks, with witnesses.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    /// Axiom 1: `source` has no in-edges but `earlier` has some.
    SourceNotFirst { source: usize, earlier: usize },
    /// Axiom 2: `vertex` has an in-edge labelled `label`, `other_vertex` one
    /// labelled `other_label > label`, yet `vertex >= other_vertex`.
    LabelOrder {
        vertex: usize,
        label: String,
        other_vertex: usize,
        other_label: String,
    },
    /// Axiom 3: edges `first = (u, v)` and `second = (w, x)` share `label`,
    /// `u < w` but `v > x`.
    OriginOrder {
        label: String,
        first: (usize, usize),
        second: (usize, usize),
    },
}

impl Violation {
    pub fn axiom(&self) -> u8 {
        match self {
            Violation::SourceNotFirst { .. } => 1,
            Violation::LabelOrder { .. } => 2,
            Violation::OriginOrder { .. } => 3,
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::SourceNotFirst { source, earlier } => write!(
                f,
                "axiom 1: vertex {source} has no in-edges but comes after vertex {earlier}, which has some"
            ),
            Violation::LabelOrder {
                vertex,
                label,
                other_vertex,
                other_label,
            } if vertex == other_vertex => write!(
                f,
                "axiom 2: vertex {vertex} has in-edges labelled both {label} and {other_label}"
            ),
            Violation::LabelOrder {
                vertex,
                label,
                other_vertex,
                other_label,
            } => write!(
                f,
                "axiom 2: vertex {vertex} has an in-edge labelled {label} and vertex \
                 {other_vertex} one labelled {other_label}, so {vertex} must precede {other_vertex}"
            ),
            Violation::OriginOrder {
                label,
                first: (u, v),
                second: (w, x),
            } => write!(
                f,
                "axiom 3: edges ({u}, {v}) and ({w}, {x}) are both labelled {label} and \
                 {u} < {w}, but {v} > {x}"
            ),
        }
    }
}

/// A range of 1-based positions; empty when `start > end`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Interval {
    pub start: usize,
    pub end: usize,
}

impl Interval {
    pub const EMPTY: Interval = Interval { start: 1, end: 0 };

    pub fn new(start: usize, end: usize) -> Self {
        Interval { start, end }
    }

    pub fn is_empty(&self) -> bool {
        self.start > self.end
    }

    pub fn len(&self) -> usize {
        if self.is_empty() {
            0
        } else {
            self.end - self.start + 1
        }
    }

    /// Canonical form: every empty interval becomes [`Interval::EMPTY`].
    pub fn normalized(self) -> Self {
        if self.is_empty() {
            Interval::EMPTY
        } else {
            self
        }
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            f.write_str("[]")
        } else {
            write!(f, "[{}, {}]", self.start, self.end)
        }
    }
}

/// Order-3 de Bruijn graph of `TACGTCGACGACT` in succinct (BOSS) form, with
/// `$`-padded source vertices. Vertices by rank: `$$$ CGA $TA GAC TAC GTC ACG
/// TCG $$T ACT CGT`; the label of an edge is the last character of its
/// destination.
pub fn small_de_bruijn() -> LabeledGraph {
    const EDGES: [(usize, usize, &str); 12] = [
        (1, 9, "T"),
        (2, 4, "C"),
        (3, 5, "C"),
        (4, 7, "G"),
        (4, 10, "T"),
        (5, 7, "G"),
        (6, 8, "G"),
        (7, 2, "A"),
        (7, 11, "T"),
        (8, 2, "A"),
        (9, 3, "A"),
        (11, 6, "C"),
    ];
    LabeledGraph::from_edges(11, &EDGES).expect("fixture is well formed")
}
