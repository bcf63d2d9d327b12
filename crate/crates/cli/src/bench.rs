use std::io::Write;
use std::time::Instant;

use anyhow::{bail, Context};
use rand::Rng;
use wheeler_sums::gen::{self, Distribution};
use wheeler_sums::{AnyPartialSums, Backend, PartialSums};

pub const DEFAULT_GRID: &str = "n=2^14..2^22;sigma=4;dist=uniform;backend=mn,entropy,chain";

const BATCH: usize = 1000;

#[derive(Clone, Debug, PartialEq)]
pub struct Grid {
    pub ns: Vec<usize>,
    pub sigmas: Vec<u32>,
    pub dists: Vec<Distribution>,
    pub backends: Vec<Backend>,
}

impl Grid {
    /// Parses `key=v1,v2;key=...`. Missing keys take their defaults; an empty
    /// value list yields an empty grid.
    pub fn parse(spec: &str) -> anyhow::Result<Grid> {
        let mut grid = Grid {
            ns: (14..=22).map(|e| 1usize << e).collect(),
            sigmas: vec![4],
            dists: vec![Distribution::Uniform],
            backends: Backend::ALL.to_vec(),
        };
        for part in spec.split(';').map(str::trim).filter(|p| !p.is_empty()) {
            let (key, values) = part
                .split_once('=')
                .with_context(|| format!("grid entry {part:?} is not key=values"))?;
            let items: Vec<&str> = values.split(',').map(str::trim).filter(|v| !v.is_empty()).collect();
            match key.trim() {
                "n" => {
                    grid.ns = Vec::new();
                    for item in items {
                        grid.ns.extend(parse_sizes(item)?);
                    }
                }
                "sigma" => {
                    grid.sigmas = items
                        .iter()
                        .map(|s| match s.parse::<u32>() {
                            Ok(v) if v >= 2 => Ok(v),
                            _ => bail!("sigma {s:?} must be an integer >= 2"),
                        })
                        .collect::<anyhow::Result<_>>()?;
                }
                "dist" => {
                    grid.dists = items
                        .iter()
                        .map(|d| match *d {
                            "uniform" => Ok(Distribution::Uniform),
                            "skewed" | "skewed-90-10" => Ok(Distribution::Skewed),
                            other => bail!("unknown distribution {other:?}"),
                        })
                        .collect::<anyhow::Result<_>>()?;
                }
                "backend" => {
                    grid.backends = items
                        .iter()
                        .map(|b| b.parse::<Backend>().map_err(anyhow::Error::from))
                        .collect::<anyhow::Result<_>>()?;
                }
                other => bail!("unknown grid key {other:?}"),
            }
        }
        Ok(grid)
    }
}

/// `1024`, `2^10`, or the power-of-two range `2^10..2^14`.
fn parse_sizes(item: &str) -> anyhow::Result<Vec<usize>> {
    let single = |s: &str| -> anyhow::Result<usize> {
        let v = match s.strip_prefix("2^") {
            Some(e) => {
                let e: u32 = e.parse().with_context(|| format!("bad exponent in {s:?}"))?;
                if e >= usize::BITS - 1 {
                    bail!("{s} is too large");
                }
                1usize << e
            }
            None => s.parse().with_context(|| format!("bad size {s:?}"))?,
        };
        if v == 0 {
            bail!("sizes must be positive");
        }
        Ok(v)
    };
    match item.split_once("..") {
        Some((lo, hi)) => {
            let (lo, hi) = (single(lo)?, single(hi)?);
            if !lo.is_power_of_two() || !hi.is_power_of_two() {
                bail!("range {item:?} must run between powers of two");
            }
            Ok((lo.trailing_zeros()..=hi.trailing_zeros()).map(|e| 1usize << e).collect())
        }
        None => Ok(vec![single(item)?]),
    }
}

fn dist_name(d: Distribution) -> &'static str {
    match d {
        Distribution::Uniform => "uniform",
        Distribution::Skewed => "skewed",
    }
}

struct Row {
    sigma: u32,
    dist: Distribution,
    backend: Backend,
    sum_ns: f64,
    search_ns: f64,
}

/// Writes one TSV row per grid cell in grid order, then `# flatness` lines
/// giving max/min median latency across n for each (sigma, dist, backend).
pub fn run(grid: &Grid, seed: u64, queries: usize, out: &mut impl Write) -> anyhow::Result<()> {
    writeln!(
        out,
        "n\tsigma\tdist\tbackend\tbuild_ms\tsum_ns\tsearch_ns\tpayload\tpointers\tsum_index\tsearch_index\ttables\ttotal"
    )?;
    let mut rows = Vec::new();
    for &sigma in &grid.sigmas {
        for &dist in &grid.dists {
            for &n in &grid.ns {
                // One workload per (sigma, dist, n), shared by all backends.
                let mut rng = gen::rng(seed ^ (n as u64).rotate_left(32) ^ ((sigma as u64) << 8) ^ dist as u64);
                let seq = gen::positive_sequence(&mut rng, n, sigma, dist);
                let u: u64 = seq.iter().map(|&x| x as u64).sum();
                let is: Vec<usize> = (0..queries).map(|_| rng.gen_range(0..=n)).collect();
                let js: Vec<u64> = (0..queries).map(|_| rng.gen_range(1..=u)).collect();
                for &backend in &grid.backends {
                    let start = Instant::now();
                    let s = AnyPartialSums::build(backend, &seq, Some(sigma))?;
                    let build_ms = start.elapsed().as_secs_f64() * 1e3;
                    let sum_ns = gen::median_ns_per_query(&is, BATCH, |i| s.sum(i).unwrap());
                    let search_ns = gen::median_ns_per_query(&js, BATCH, |j| s.search(j).unwrap() as u64);
                    let space = s.space_breakdown();
                    write!(
                        out,
                        "{n}\t{sigma}\t{}\t{backend}\t{build_ms:.1}\t{sum_ns:.1}\t{search_ns:.1}",
                        dist_name(dist)
                    )?;
                    for (_, bits) in space.components() {
                        write!(out, "\t{:.4}", bits as f64 / n as f64)?;
                    }
                    writeln!(out, "\t{:.4}", space.total_bits() as f64 / n as f64)?;
                    rows.push(Row {
                        sigma,
                        dist,
                        backend,
                        sum_ns,
                        search_ns,
                    });
                }
            }
        }
    }
    if grid.ns.len() > 1 {
        writeln!(out, "# flatness\tsigma\tdist\tbackend\tsum_ratio\tsearch_ratio")?;
        for &sigma in &grid.sigmas {
            for &dist in &grid.dists {
                for &backend in &grid.backends {
                    let cell: Vec<&Row> = rows
                        .iter()
                        .filter(|r| r.sigma == sigma && r.dist == dist && r.backend == backend)
                        .collect();
                    let ratio = |f: fn(&Row) -> f64| {
                        let v = cell.iter().map(|r| f(r));
                        v.clone().fold(f64::MIN, f64::max) / v.fold(f64::MAX, f64::min)
                    };
                    writeln!(
                        out,
                        "# flatness\t{sigma}\t{}\t{backend}\t{:.2}\t{:.2}",
                        dist_name(dist),
                        ratio(|r| r.sum_ns),
                        ratio(|r| r.search_ns)
                    )?;
                }
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_parsing() {
        let g = Grid::parse("n=2^4..2^6,100;sigma=2,16;dist=skewed;backend=chain").unwrap();
        assert_eq!(g.ns, [16, 32, 64, 100]);
        assert_eq!(g.sigmas, [2, 16]);
        assert_eq!(g.dists, [Distribution::Skewed]);
        assert_eq!(g.backends, [Backend::Chain]);
        assert_eq!(Grid::parse("").unwrap().ns.len(), 9);
        assert!(Grid::parse("n=").unwrap().ns.is_empty());
        assert!(Grid::parse("n=2^3..100").is_err());
        assert!(Grid::parse("sigma=1").is_err());
        assert!(Grid::parse("colour=red").is_err());
        assert!(Grid::parse("backend=fast").is_err());
    }

    #[test]
    fn empty_grid_prints_header_only() {
        let mut out = Vec::new();
        run(&Grid::parse("n=").unwrap(), 1, 10, &mut out).unwrap();
        assert_eq!(String::from_utf8(out).unwrap().lines().count(), 1);
    }
}
