use std::fs::{self, File};
use std::io::{self, BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use anyhow::Context;
use wheeler_sums::wheeler::GraphStats;
use wheeler_sums::{
    hk, AnyPartialSums, Backend, Error, InDegreeSums, LabeledGraph, OutDegreeSums, PartialSums,
    SpaceBreakdown, WheelerIndex,
};

const INDEX_MAGIC: &[u8] = b"WGI1";

pub fn build(input: &Path, output: &Path, backend: Backend, out: &mut impl Write) -> anyhow::Result<()> {
    let text = fs::read_to_string(input).with_context(|| format!("reading {}", input.display()))?;
    let graph = LabeledGraph::parse(&text).with_context(|| format!("parsing {}", input.display()))?;
    let index = WheelerIndex::build(&graph, backend)?;
    let mut w = BufWriter::new(
        File::create(output).with_context(|| format!("creating {}", output.display()))?,
    );
    index.write_to(&mut w)?;
    w.flush()?;
    writeln!(out, "backend\t{backend}")?;
    write!(out, "{}", index.stats())?;
    let space = index.space();
    write_space_header(out)?;
    write_space_row(out, "out", backend, &space.out_degrees, graph.num_vertices())?;
    write_space_row(out, "in", backend, &space.in_degrees, graph.num_vertices())?;
    writeln!(out, "label_bits\t{}", space.label_bits)?;
    writeln!(out, "total_bits\t{}", space.total_bits())?;
    Ok(())
}

fn load_index(path: &Path) -> anyhow::Result<WheelerIndex> {
    let mut r = BufReader::new(File::open(path).with_context(|| format!("opening {}", path.display()))?);
    WheelerIndex::read_from(&mut r).with_context(|| format!("loading index {}", path.display()))
}

pub fn query(
    input: &Path,
    patterns: &[String],
    pattern_file: Option<&Path>,
    out: &mut impl Write,
) -> anyhow::Result<()> {
    let index = load_index(input)?;
    for p in patterns {
        writeln!(out, "{}", index.query_line(p)?)?;
    }
    let lines: Box<dyn BufRead> = match pattern_file {
        Some(path) => Box::new(BufReader::new(
            File::open(path).with_context(|| format!("opening {}", path.display()))?,
        )),
        None if patterns.is_empty() => Box::new(BufReader::new(io::stdin())),
        None => return Ok(()),
    };
    for line in lines.lines() {
        let line = line?;
        writeln!(out, "{}", index.query_line(line.trim_end_matches('\r'))?)?;
    }
    Ok(())
}

pub fn stats(input: &Path, k: usize, out: &mut impl Write) -> anyhow::Result<()> {
    let mut bytes = Vec::new();
    File::open(input)
        .with_context(|| format!("opening {}", input.display()))?
        .read_to_end(&mut bytes)?;
    if bytes.starts_with(INDEX_MAGIC) {
        let index = WheelerIndex::read_from(&mut bytes.as_slice())
            .with_context(|| format!("loading index {}", input.display()))?;
        index_stats(&index, out)
    } else {
        let text = String::from_utf8(bytes).context("sequence file is not UTF-8")?;
        sequence_stats(&parse_sequence(&text)?, k, out)
    }
}

fn index_stats(index: &WheelerIndex, out: &mut impl Write) -> anyhow::Result<()> {
    let dout = index.out_degree_sums().degrees();
    let din = index.in_degree_sums().degrees();
    writeln!(out, "backend\t{}", index.backend())?;
    write!(out, "{}", GraphStats::from_degrees(&dout, &din))?;
    write_space_header(out)?;
    for backend in Backend::ALL {
        let o = OutDegreeSums::build(backend, &dout)?.space_breakdown();
        write_space_row(out, "out", backend, &o, dout.len())?;
    }
    for backend in Backend::ALL {
        let i = InDegreeSums::build(backend, &din)?.space_breakdown();
        write_space_row(out, "in", backend, &i, din.len())?;
    }
    Ok(())
}

/// Integers separated by whitespace; `#` starts a comment line.
fn parse_sequence(text: &str) -> anyhow::Result<Vec<u32>> {
    let mut seq = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        if line.trim_start().starts_with('#') {
            continue;
        }
        for token in line.split_whitespace() {
            seq.push(token.parse().map_err(|_| Error::Parse {
                line: lineno + 1,
                message: format!("expected a non-negative integer, found {token:?}"),
            })?);
        }
    }
    Ok(seq)
}

fn sequence_stats(seq: &[u32], k: usize, out: &mut impl Write) -> anyhow::Result<()> {
    let n = seq.len();
    writeln!(out, "n\t{n}")?;
    writeln!(out, "sum\t{}", seq.iter().map(|&x| x as u64).sum::<u64>())?;
    writeln!(out, "max\t{}", seq.iter().copied().max().unwrap_or(0))?;
    for order in 0..=k {
        writeln!(out, "H{order}\t{:.6}", hk(seq, order))?;
    }
    write_space_header(out)?;
    let has_zero = seq.contains(&0);
    for backend in Backend::ALL {
        if has_zero && backend.requires_positive() {
            writeln!(out, "seq\t{backend}\t-\t-\t-\t-\t-\t-")?;
            continue;
        }
        let s = AnyPartialSums::build(backend, seq, None)?;
        write_space_row(out, "seq", backend, &s.space_breakdown(), n)?;
    }
    Ok(())
}

fn write_space_header(out: &mut impl Write) -> io::Result<()> {
    writeln!(out, "# bits per element")?;
    write!(out, "sequence\tbackend")?;
    for (name, _) in SpaceBreakdown::default().components() {
        write!(out, "\t{name}")?;
    }
    writeln!(out, "\ttotal")
}

fn write_space_row(
    out: &mut impl Write,
    which: &str,
    backend: Backend,
    space: &SpaceBreakdown,
    n: usize,
) -> io::Result<()> {
    let per = |bits: u64| if n == 0 { 0.0 } else { bits as f64 / n as f64 };
    write!(out, "{which}\t{backend}")?;
    for (_, bits) in space.components() {
        write!(out, "\t{:.4}", per(bits))?;
    }
    writeln!(out, "\t{:.4}", per(space.total_bits()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sequence_parsing() {
        assert_eq!(parse_sequence("1 2\n# note\n 3\t4\n").unwrap(), [1, 2, 3, 4]);
        let err = parse_sequence("1 2\n3 x\n").unwrap_err();
        assert!(matches!(err.downcast_ref::<Error>(), Some(Error::Parse { line: 2, .. })));
    }

    #[test]
    fn constant_sequence_report() {
        let mut out = Vec::new();
        sequence_stats(&[3; 1000], 2, &mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        assert!(text.contains("H0\t0.000000"));
        let entropy_row = text.lines().find(|l| l.starts_with("seq\tentropy")).unwrap();
        assert_eq!(entropy_row.split('\t').nth(2), Some("0.0000"));
    }
}
