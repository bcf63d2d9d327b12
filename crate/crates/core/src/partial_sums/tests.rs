use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::bitvector::BitVector;

fn prefix_sums(seq: &[u32]) -> Vec<u64> {
    let mut out = vec![0u64];
    for &x in seq {
        out.push(out.last().unwrap() + x as u64);
    }
    out
}

/// Smallest i with prefix[i] >= j, by linear scan.
fn scan_search(prefix: &[u64], j: u64) -> usize {
    prefix.iter().position(|&s| s >= j).unwrap()
}

fn check_all(seq: &[u32], sigma: u32) {
    let prefix = prefix_sums(seq);
    let u = *prefix.last().unwrap();
    for backend in Backend::ALL {
        let ps = AnyPartialSums::build(backend, seq, Some(sigma)).unwrap();
        assert_eq!(ps.len(), seq.len());
        assert_eq!(ps.total(), u);
        assert_eq!(ps.backend(), backend);
        for (i, &want) in prefix.iter().enumerate() {
            assert_eq!(ps.sum(i).unwrap(), want, "{backend} sum({i})");
        }
        for j in 1..=u {
            let got = ps.search(j).unwrap();
            assert_eq!(got, scan_search(&prefix, j), "{backend} search({j})");
            assert!(ps.sum(got - 1).unwrap() < j && j <= ps.sum(got).unwrap());
        }
        for i in 1..=seq.len() {
            assert_eq!(ps.search(prefix[i]).unwrap(), i);
        }
        assert_eq!(ps.to_vec(), seq);
    }
}

#[test]
fn mn_encoding() {
    let mn = MnSums::build(&[2, 1, 3]).unwrap();
    assert_eq!(mn.bits().to_string(), "011001");
    assert_eq!(mn.total(), 6);
    assert_eq!(
        (1..=3).map(|i| mn.sum(i).unwrap()).collect::<Vec<_>>(),
        [2, 3, 6]
    );
    assert_eq!(MnSums::build(&[1, 1, 1]).unwrap().bits().to_string(), "111");

    let din_shifted = [2, 1, 1, 1, 1, 2, 1, 1, 1, 1];
    let mn = MnSums::build(&din_shifted).unwrap();
    assert_eq!(mn.total(), 12);
    assert_eq!(mn.bits().count_ones(), 10);

    assert!(MnSums::build(&[1, 0, 2]).is_err());
}

#[test]
fn mn_space_is_unary_payload_plus_directory() {
    let mn = MnSums::build(&[3, 1, 4, 1, 5]).unwrap();
    let space = mn.space_breakdown();
    assert_eq!(space.payload_bits, 14);
    assert_eq!(space.auxiliary_bits(), mn.bits().space().index_bits);
}

#[test]
fn chain_levels_for_out_degrees() {
    let dout = [1, 1, 1, 2, 1, 1, 2, 1, 1, 0, 1];
    let chain = ChainSums::build(&dout, 3).unwrap();
    assert_eq!(chain.levels().len(), 2);
    assert_eq!(chain.levels()[0].to_string(), "00010010010");
    assert_eq!(chain.levels()[1].to_string(), "001");

    let (total, steps) = chain.sum_trace(8).unwrap();
    assert_eq!(total, 10);
    assert_eq!(steps[0].zeros, 6);
    assert_eq!(steps[1].position, 2);
    assert_eq!(steps[1].zeros, 2);
    assert_eq!(chain.sum(3).unwrap(), 3);
    assert_eq!(chain.sum(6).unwrap(), 7);
    assert_eq!(chain.to_vec(), dout);
}

#[test]
fn chain_degenerate_inputs() {
    let zeros = ChainSums::build(&[0; 9], 4).unwrap();
    assert!(zeros.levels()[0].iter().all(|b| b));
    assert!((0..=9).all(|i| zeros.sum(i).unwrap() == 0));
    assert!(zeros.search(1).is_err());

    let constant = ChainSums::build(&[3; 20], 4).unwrap();
    assert!((0..=20).all(|i| constant.sum(i).unwrap() == 3 * i as u64));

    assert!(ChainSums::build(&[4], 4).is_err());
    let empty = ChainSums::build(&[], 1).unwrap();
    assert_eq!(empty.sum(0).unwrap(), 0);
}

#[test]
fn chain_search_with_zeros() {
    let seq = [0, 2, 0, 0, 1, 3, 0];
    let chain = ChainSums::build(&seq, 4).unwrap();
    let prefix = prefix_sums(&seq);
    for j in 1..=6 {
        assert_eq!(chain.search(j).unwrap(), scan_search(&prefix, j));
    }
}

#[test]
fn out_of_range_arguments() {
    for backend in Backend::ALL {
        let ps = AnyPartialSums::build(backend, &[2, 3], None).unwrap();
        assert_eq!(ps.sum(0).unwrap(), 0);
        assert_eq!(ps.search(1).unwrap(), 1);
        assert!(matches!(ps.sum(3), Err(Error::OutOfRange { .. })));
        assert!(matches!(ps.search(0), Err(Error::OutOfRange { .. })));
        assert!(matches!(ps.search(6), Err(Error::OutOfRange { .. })));
    }
    assert!(AnyPartialSums::build(Backend::Mn, &[1, 0], None).is_err());
    assert!(AnyPartialSums::build(Backend::Entropy, &[1, 0], None).is_err());
    assert!(AnyPartialSums::build(Backend::Chain, &[3], Some(2)).is_err());
}

#[test]
fn backends_agree_on_random_corpus() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for round in 0..300 {
        let sigma = [2u32, 4, 16][round % 3];
        let n = rng.gen_range(0..=512);
        let seq: Vec<u32> = (0..n).map(|_| rng.gen_range(1..sigma)).collect();
        check_all(&seq, sigma);
    }
}

#[test]
fn larger_sequences_agree() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for &(n, sigma) in &[(70_000usize, 4u32), (30_000, 9)] {
        let seq: Vec<u32> = (0..n)
            .map(|_| if rng.gen_bool(0.8) { 1 } else { rng.gen_range(1..sigma) })
            .collect();
        let prefix = prefix_sums(&seq);
        let all: Vec<AnyPartialSums> = Backend::ALL
            .iter()
            .map(|&b| AnyPartialSums::build(b, &seq, Some(sigma)).unwrap())
            .collect();
        for _ in 0..20_000 {
            let i = rng.gen_range(0..=n);
            let j = rng.gen_range(1..=prefix[n]);
            for ps in &all {
                assert_eq!(ps.sum(i).unwrap(), prefix[i]);
                assert_eq!(ps.search(j).unwrap(), scan_search(&prefix, j));
            }
        }
    }
}

#[test]
fn serialization_round_trip() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for n in [0usize, 1, 300, 5000] {
        let seq: Vec<u32> = (0..n).map(|_| rng.gen_range(1..6)).collect();
        for backend in Backend::ALL {
            let ps = AnyPartialSums::build(backend, &seq, None).unwrap();
            let mut buf = Vec::new();
            ps.write_to(&mut buf).unwrap();
            assert_eq!(&buf[..4], b"WPS1");
            let back = AnyPartialSums::read_from(&mut buf.as_slice()).unwrap();
            assert_eq!(back.backend(), backend);
            assert_eq!(back.to_vec(), seq);
            assert_eq!(back.space_breakdown(), ps.space_breakdown());
            let mut again = Vec::new();
            back.write_to(&mut again).unwrap();
            assert_eq!(again, buf);
        }
    }
}

#[test]
fn corrupt_header_is_rejected() {
    let ps = AnyPartialSums::build(Backend::Mn, &[1, 2, 3], None).unwrap();
    let mut buf = Vec::new();
    ps.write_to(&mut buf).unwrap();
    buf[4] = 7; // backend tag
    assert!(AnyPartialSums::read_from(&mut buf.as_slice()).is_err());

    let mut buf = Vec::new();
    ps.write_to(&mut buf).unwrap();
    buf[12] = 9; // n
    assert!(AnyPartialSums::read_from(&mut buf.as_slice()).is_err());

    let bad_tail = BitVector::from_bit_str("0110").unwrap();
    assert!(MnSums::from_bits(bad_tail, 3).is_err());
}

#[test]
fn backend_names() {
    for b in Backend::ALL {
        assert_eq!(b.name().parse::<Backend>().unwrap(), b);
    }
    assert!("wavelet".parse::<Backend>().is_err());
}

proptest! {
    #[test]
    fn galois_connection(seq in prop::collection::vec(1u32..9, 1..200)) {
        for backend in Backend::ALL {
            let ps = AnyPartialSums::build(backend, &seq, None).unwrap();
            for i in 1..=seq.len() {
                prop_assert_eq!(ps.search(ps.sum(i).unwrap()).unwrap(), i);
            }
            for j in 1..=ps.total() {
                let i = ps.search(j).unwrap();
                prop_assert!(ps.sum(i - 1).unwrap() < j);
                prop_assert!(j <= ps.sum(i).unwrap());
            }
        }
    }

    #[test]
    fn sums_are_strictly_increasing(seq in prop::collection::vec(1u32..5, 0..300)) {
        let ps = AnyPartialSums::build(Backend::Entropy, &seq, None).unwrap();
        for i in 1..=seq.len() {
            prop_assert!(ps.sum(i).unwrap() > ps.sum(i - 1).unwrap());
        }
    }
}
