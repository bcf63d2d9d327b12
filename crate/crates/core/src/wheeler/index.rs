use std::fmt;
use std::io::{Read, Write};

use crate::bitvector::{BitVector, BitVectorBuilder};
use crate::entropy::hk;
use crate::error::{check_range, Error, Result};
use crate::io;
use crate::partial_sums::{Backend, InDegreeSums, OutDegreeSums, PartialSums, SpaceBreakdown};

use super::{Interval, LabeledGraph};

const MAGIC: &[u8; 4] = b"WGI1";

/// Pattern index over a Wheeler graph.
///
/// Edges are listed by origin rank (`L` is their label sequence). The out-degree
/// sums map a vertex interval to the edges leaving it, per-label rank plus the
/// label counts `C` select those with a given label, and because of axiom 3
/// their destinations are the contiguous range found by in-degree search.
#[derive(Clone, Debug)]
pub struct WheelerIndex {
    n: usize,
    dout: OutDegreeSums,
    din: InDegreeSums,
    /// `occ[a]` marks the positions of `L` holding `a`.
    occ: Vec<BitVector>,
    /// `counts[a]` = number of labels smaller than `a`; `counts[sigma] = |L|`.
    counts: Vec<u64>,
    labels: Vec<String>,
}

/// Intermediate intervals of one forward step.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct StepTrace {
    /// Edges leaving the source interval, as positions in `L`.
    pub edges_out: Interval,
    /// The subset of those carrying the label, as positions in `L` sorted by
    /// (label, origin), which is also destination order.
    pub edges_labelled: Interval,
    pub vertices: Interval,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct IndexSpace {
    pub out_degrees: SpaceBreakdown,
    pub in_degrees: SpaceBreakdown,
    /// Payload plus rank directories of the per-label bitvectors.
    pub label_bits: u64,
    pub count_bits: u64,
}

impl IndexSpace {
    pub fn total_bits(&self) -> u64 {
        self.out_degrees.total_bits() + self.in_degrees.total_bits() + self.label_bits + self.count_bits
    }
}

impl WheelerIndex {
    /// Validates `g` and builds the index; a broken axiom yields
    /// [`Error::NotWheeler`].
    pub fn build(g: &LabeledGraph, backend: Backend) -> Result<Self> {
        g.validate().map_err(Error::NotWheeler)?;
        let sigma = g.alphabet_size();
        let mut by_origin: Vec<_> = g.edges().to_vec();
        by_origin.sort_by_key(|e| e.origin); // stable: ties keep input order
        let mut builders: Vec<BitVectorBuilder> = (0..sigma)
            .map(|_| BitVectorBuilder::with_capacity(by_origin.len()))
            .collect();
        let mut counts = vec![0u64; sigma + 1];
        for e in &by_origin {
            for (a, b) in builders.iter_mut().enumerate() {
                b.push(a as u32 == e.label);
            }
            counts[e.label as usize + 1] += 1;
        }
        for a in 1..=sigma {
            counts[a] += counts[a - 1];
        }
        Ok(WheelerIndex {
            n: g.num_vertices(),
            dout: OutDegreeSums::build(backend, &g.out_degrees())?,
            din: InDegreeSums::build(backend, &g.in_degrees())?,
            occ: builders.into_iter().map(BitVectorBuilder::build).collect(),
            counts,
            labels: g.labels().to_vec(),
        })
    }

    pub fn num_vertices(&self) -> usize {
        self.n
    }

    pub fn num_edges(&self) -> usize {
        *self.counts.last().unwrap() as usize
    }

    pub fn alphabet_size(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn backend(&self) -> Backend {
        self.dout.inner().backend()
    }

    pub fn out_degree_sums(&self) -> &OutDegreeSums {
        &self.dout
    }

    pub fn in_degree_sums(&self) -> &InDegreeSums {
        &self.din
    }

    pub fn symbol(&self, token: &str) -> Option<u32> {
        self.labels
            .binary_search_by(|l| l.as_str().cmp(token))
            .ok()
            .map(|s| s as u32)
    }

    /// Occurrences of symbol `a` in `L[1..=i]`; 0 for symbols outside the alphabet.
    pub fn label_rank(&self, a: u32, i: usize) -> Result<usize> {
        check_range("label rank position", i as u64, 0, self.num_edges() as u64)?;
        Ok(self.occ.get(a as usize).map_or(0, |b| b.rank1_unchecked(i)))
    }

    /// Number of edge labels smaller than `a`; `|L|` when `a` is past the alphabet.
    pub fn csum(&self, a: u32) -> u64 {
        self.counts[(a as usize).min(self.labels.len())]
    }

    /// Vertices reached from `v` by one edge labelled `a`.
    pub fn forward_step(&self, v: Interval, a: u32) -> Result<Interval> {
        Ok(self.forward_step_traced(v, a)?.vertices)
    }

    pub fn forward_step_traced(&self, v: Interval, a: u32) -> Result<StepTrace> {
        let empty = StepTrace {
            edges_out: Interval::EMPTY,
            edges_labelled: Interval::EMPTY,
            vertices: Interval::EMPTY,
        };
        if v.is_empty() {
            return Ok(empty);
        }
        check_range("interval start", v.start as u64, 1, self.n as u64)?;
        check_range("interval end", v.end as u64, 1, self.n as u64)?;
        let edges_out = Interval::new(
            self.dout.sum(v.start - 1)? as usize + 1,
            self.dout.sum(v.end)? as usize,
        );
        if edges_out.is_empty() || a as usize >= self.labels.len() {
            return Ok(StepTrace {
                edges_out: edges_out.normalized(),
                ..empty
            });
        }
        let base = self.counts[a as usize] as usize;
        let edges_labelled = Interval::new(
            base + self.label_rank(a, edges_out.start - 1)? + 1,
            base + self.label_rank(a, edges_out.end)?,
        );
        if edges_labelled.is_empty() {
            return Ok(StepTrace {
                edges_out,
                ..empty
            });
        }
        let vertices = Interval::new(
            self.din.search(edges_labelled.start as u64)?,
            self.din.search(edges_labelled.end as u64)?,
        );
        Ok(StepTrace {
            edges_out,
            edges_labelled,
            vertices,
        })
    }

    /// Vertices reachable by a path spelling `pattern`, starting anywhere.
    /// The empty pattern matches every vertex.
    pub fn match_symbols(&self, pattern: &[u32]) -> Result<Interval> {
        let mut v = Interval::new(1, self.n).normalized();
        for &a in pattern {
            if v.is_empty() {
                break;
            }
            v = self.forward_step(v, a)?;
        }
        Ok(v.normalized())
    }

    /// Like [`match_symbols`](Self::match_symbols) on the tokens of `pattern`
    /// (see [`tokenize`]); an unknown token matches nothing.
    pub fn match_pattern(&self, pattern: &str) -> Result<Interval> {
        let mut symbols = Vec::new();
        for token in tokenize(pattern) {
            match self.symbol(token) {
                Some(a) => symbols.push(a),
                None => return Ok(Interval::EMPTY),
            }
        }
        self.match_symbols(&symbols)
    }

    /// One output line: `pattern<TAB>start<TAB>end`, or `pattern<TAB>-` when
    /// nothing matches.
    pub fn query_line(&self, pattern: &str) -> Result<String> {
        let v = self.match_pattern(pattern)?;
        Ok(if v.is_empty() {
            format!("{pattern}\t-")
        } else {
            format!("{pattern}\t{}\t{}", v.start, v.end)
        })
    }

    /// The edge label sequence `L`.
    pub fn label_sequence(&self) -> Vec<u32> {
        (0..self.num_edges())
            .map(|p| {
                self.occ
                    .iter()
                    .position(|b| b.get(p))
                    .expect("every edge has a label") as u32
            })
            .collect()
    }

    pub fn stats(&self) -> GraphStats {
        GraphStats::from_degrees(&self.dout.degrees(), &self.din.degrees())
    }

    pub fn space(&self) -> IndexSpace {
        IndexSpace {
            out_degrees: self.dout.space_breakdown(),
            in_degrees: self.din.space_breakdown(),
            label_bits: self.occ.iter().map(|b| b.space().total()).sum(),
            count_bits: 64 * self.counts.len() as u64,
        }
    }

    pub fn write_to<W: Write>(&self, w: &mut W) -> Result<()> {
        io::write_magic(w, MAGIC)?;
        io::write_u64(w, self.n as u64)?;
        io::write_u64(w, self.labels.len() as u64)?;
        for l in &self.labels {
            io::write_bytes(w, l.as_bytes())?;
        }
        self.dout.write_to(w)?;
        self.din.write_to(w)?;
        self.occ.iter().try_for_each(|b| b.write_to(w))
    }

    /// Reads an index and checks that its parts describe the same graph.
    pub fn read_from<R: Read>(r: &mut R) -> Result<Self> {
        io::read_magic(r, MAGIC)?;
        let n = io::read_usize(r)?;
        let sigma = io::read_usize(r)?;
        let labels = (0..sigma)
            .map(|_| {
                String::from_utf8(io::read_bytes(r)?)
                    .map_err(|_| Error::format("label is not valid UTF-8"))
            })
            .collect::<Result<Vec<_>>>()?;
        if labels.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::format("label dictionary is not sorted"));
        }
        let dout = OutDegreeSums::read_from(r)?;
        let din = InDegreeSums::read_from(r)?;
        let occ = (0..sigma)
            .map(|_| BitVector::read_from(r))
            .collect::<Result<Vec<_>>>()?;
        let m = dout.total();
        if dout.len() != n || din.len() != n || din.total() != m {
            return Err(Error::format("degree sequences disagree with the vertex or edge count"));
        }
        if occ.iter().any(|b| b.len() as u64 != m) {
            return Err(Error::format("label bitvectors do not span the edge list"));
        }
        let mut counts = vec![0u64; sigma + 1];
        for (a, b) in occ.iter().enumerate() {
            counts[a + 1] = counts[a] + b.count_ones() as u64;
        }
        if counts[sigma] != m || (0..m as usize).any(|p| occ.iter().filter(|b| b.get(p)).count() != 1) {
            return Err(Error::format("every edge must carry exactly one label"));
        }
        Ok(WheelerIndex {
            n,
            dout,
            din,
            occ,
            counts,
            labels,
        })
    }
}

/// Splits a pattern into label tokens: on whitespace if it contains any,
/// otherwise into single characters.
pub fn tokenize(pattern: &str) -> Vec<&str> {
    if pattern.contains(char::is_whitespace) {
        pattern.split_whitespace().collect()
    } else {
        pattern
            .char_indices()
            .map(|(i, c)| &pattern[i..i + c.len_utf8()])
            .collect()
    }
}

/// Degree profile of a graph. `out_entropy[k]` and `in_entropy[k]` are the
/// order-`k` empirical entropies of the degree sequences in rank order.
#[derive(Clone, Debug, PartialEq)]
pub struct GraphStats {
    pub vertices: usize,
    pub edges: u64,
    pub max_in_degree: u32,
    pub max_out_degree: u32,
    pub out_entropy: [f64; 4],
    pub in_entropy: [f64; 4],
}

impl GraphStats {
    pub fn from_degrees(dout: &[u32], din: &[u32]) -> Self {
        GraphStats {
            vertices: dout.len(),
            edges: dout.iter().map(|&d| d as u64).sum(),
            max_in_degree: din.iter().copied().max().unwrap_or(0),
            max_out_degree: dout.iter().copied().max().unwrap_or(0),
            out_entropy: std::array::from_fn(|k| hk(dout, k)),
            in_entropy: std::array::from_fn(|k| hk(din, k)),
        }
    }

    pub fn of_graph(g: &LabeledGraph) -> Self {
        Self::from_degrees(&g.out_degrees(), &g.in_degrees())
    }
}

impl fmt::Display for GraphStats {
    /// `key<TAB>value` lines.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "vertices\t{}", self.vertices)?;
        writeln!(f, "edges\t{}", self.edges)?;
        writeln!(f, "max_in_degree\t{}", self.max_in_degree)?;
        writeln!(f, "max_out_degree\t{}", self.max_out_degree)?;
        for (k, h) in self.out_entropy.iter().enumerate() {
            writeln!(f, "H{k}_out\t{h:.6}")?;
        }
        for (k, h) in self.in_entropy.iter().enumerate() {
            writeln!(f, "H{k}_in\t{h:.6}")?;
        }
        Ok(())
    }
}
