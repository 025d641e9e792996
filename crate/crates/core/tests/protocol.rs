use rand::Rng;
use skalab::hashing::{build_prefix_extractor, ExtractorTable};
use skalab::protocol::*;
use skalab::vm::C_COPY;
use skalab::*;

fn oracle(n: usize) -> Oracle {
    Oracle::new(SpaceSchedule::default(), OracleConfig::for_input_len(n)).unwrap()
}

fn flipped_pair(seed: u64, i: u64, n: usize, flips: usize) -> (BitString, BitString) {
    let mut r = rng::derived_stream(seed, "pair", i);
    let x = BitString::from_uint(r.random_range(0..1u128 << n), n);
    let mut y = x.clone();
    for pos in rand::seq::index::sample(&mut r, n, flips) {
        y.flip(pos);
    }
    (x, y)
}

fn is_zeros_then_one(s: &BitString) -> bool {
    let b = s.bits();
    !b.is_empty() && b[b.len() - 1] && b[..b.len() - 1].iter().all(|&v| !v)
}

fn sigma(p: f64, trials: usize) -> f64 {
    (p * (1.0 - p) / trials as f64).sqrt()
}

fn micro_extractor() -> ExtractorTable {
    build_prefix_extractor(4, 5, 4, Rational::new(1, 5), 7, 4, 100).unwrap()
}

#[test]
fn a_identical_inputs_golden() {
    let o = oracle(4);
    let x = bs("1011");
    let r = run_protocol_a(&o, &x, &x, Rational::new(1, 4), 42).unwrap();
    assert!(r.agreed);
    assert!(r.rounds_used <= C_COPY);
    assert_eq!(r.x_bob.as_ref(), Some(&x));
    assert_eq!(r.transcript.bob_bits(), bs("0001"));
    assert_eq!(
        r.transcript.digest(),
        "2045722cc583d3ff4b4c93c0b9f960b48fd6b13029c0274ca9da03249bcf9a44"
    );
    assert_eq!(
        r.transcript_file().digest(),
        "737197e18a57b1da27036b3c3d1d7d4fd84696553621d682a2eef9725d7f9736"
    );
}

#[test]
fn a_sweep_agreement_and_shape() {
    let o = oracle(6);
    let eps = Rational::new(1, 5);
    let trials = 200;
    let mut agreed = 0;
    for i in 0..trials {
        let (x, y) = flipped_pair(11, i, 6, 2);
        let r = run_protocol_a(&o, &x, &y, eps, i).unwrap();
        assert!(is_zeros_then_one(&r.transcript.bob_bits()));
        assert_eq!(r.p.len(), r.rounds_used + 1 + 6);
        if r.agreed {
            agreed += 1;
            // the key is the oracle's witness for x given (p, H)
            let c = o.complexity(&x, &r.key_condition, BASE_LEVEL).unwrap();
            assert_eq!(c.witness.as_ref(), Some(&r.z_alice));
        }
    }
    let rate = agreed as f64 / trials as f64;
    assert!(rate >= 0.8 - 3.0 * sigma(0.8, trials as usize), "agreement {rate}");
}

#[test]
fn a_per_round_soundness() {
    let o = oracle(6);
    let eps = Rational::new(1, 5);
    let (x, y) = flipped_pair(3, 0, 6, 2);
    let delta = eps.to_f64() / 12.0;
    let trials = 1000;
    for j in [3usize, 7] {
        let wrong = (0..trials)
            .filter(|&s| round_false_match(&o, &x, &y, j, eps, s).unwrap())
            .count();
        let rate = wrong as f64 / trials as f64;
        assert!(rate <= delta + 3.0 * sigma(delta, trials as usize), "round {j}: {rate}");
    }
}

#[test]
fn a_exhaustion_is_reported() {
    let cfg = OracleConfig {
        l_max: 2,
        ..OracleConfig::for_input_len(4)
    };
    let o = Oracle::new(SpaceSchedule::default(), cfg).unwrap();
    let err = run_protocol_a(&o, &bs("1011"), &bs("0000"), Rational::new(1, 4), 1).unwrap_err();
    assert_eq!(err, Error::ReconciliationExhausted { rounds: 2 });
}

#[test]
fn parameters_a() {
    // delta = (1/5) / 12 = 1/60, L = 6
    let p = ParamsA::new(6, Rational::new(1, 5), 9).unwrap();
    assert_eq!(p.delta, Rational::new(1, 60));
    assert_eq!(p.log_inv_delta, 6);
    assert_eq!(p.rows, 6 + 1 + 1 + 6);
    assert_eq!(p.max_round, 7);
    assert!(ParamsA::new(6, Rational::integer(1), 9).is_err());
}

#[test]
fn parameters_b() {
    let e = micro_extractor();
    let p = ParamsB::new(&e, Rational::new(1, 5), 1).unwrap();
    // s = 5 * 4 * 32, t = 5 * s * 16
    assert_eq!((p.s, p.t), (640, 51_200));
    assert_eq!((p.certified, p.max_round), (4, 4));
    assert!(ParamsB::new(&e, Rational::new(1, 5), 12).is_err());
}

#[test]
fn b_identical_inputs_within_k_star() {
    let o = oracle(4);
    let eps = Rational::new(1, 5);
    let setup = SetupB::new(micro_extractor(), eps, 1).unwrap();
    let trials = 200u64;
    let mut good = 0;
    for i in 0..trials {
        let mut r = rng::derived_stream(5, "x", i);
        let x = BitString::from_uint(r.random_range(0..16), 4);
        let res = run_protocol_b(&o, &x, &x, &setup, i).unwrap();
        let k_star = o.k_star(&x, &x, 1).unwrap();
        assert!(res.rounds_used <= 4);
        assert!(is_zeros_then_one(&res.transcript.bob_bits()));
        if res.agreed {
            assert!(res.prefix_bits <= k_star);
            if res.rounds_used <= k_star {
                good += 1;
            }
        }
    }
    let p = 1.0 - 3.0 * eps.to_f64();
    assert!(good as f64 / trials as f64 >= p);
}

#[test]
fn b_transcript_length_and_golden() {
    let o = oracle(4);
    let setup = SetupB::new(micro_extractor(), Rational::new(1, 5), 1).unwrap();
    let (x, y) = (bs("1110"), bs("0110"));
    let r = run_protocol_b(&o, &x, &y, &setup, 2024).unwrap();
    assert!(r.agreed);
    assert_eq!(r.p.len(), r.round0_bits + r.prefix_bits);
    let framing: usize = r
        .transcript
        .messages
        .iter()
        .map(|m| message_bits(m.payload.len()) - m.payload.len())
        .sum();
    assert!(r.transcript.len_bits() <= 2 * r.p.len() + framing);
    assert_eq!(
        r.transcript.digest(),
        "1dde7930e520fce9571985d1eddec3b740397d2154e52158f8bd2108c50e6fb3"
    );
}

#[test]
fn b_prefix_certification_enforced() {
    let o = oracle(4);
    let mut e = micro_extractor();
    e.prefix_certified_upto = Some(1);
    let setup = SetupB::new(e, Rational::new(1, 5), 1).unwrap();
    // x unrelated to y needs all four rounds
    let err = run_protocol_b(&o, &bs("1110"), &bs("0001"), &setup, 3).unwrap_err();
    assert_eq!(err, Error::PrefixNotCertified { round: 2, certified: 1 });
    assert!(run_protocol_b(&o, &bs("111"), &bs("0001"), &setup, 3).is_err());
}

#[test]
fn replay_round_trip_and_corruption() {
    let o = oracle(6);
    let (x, y) = flipped_pair(8, 0, 6, 2);
    let r = run_protocol_a(&o, &x, &y, Rational::new(1, 5), 8).unwrap();
    let ser = r.transcript.serialization();
    let replayed = channel_replay(&ser).unwrap();
    assert_eq!(replayed, r.transcript.messages);
    let live = r.transcript.observe_all().unwrap();
    assert_eq!(Transcript { messages: replayed }.observe_all().unwrap(), live);

    let digest = r.transcript.digest();
    let mut stream = rng::stream(99);
    let (mut rejected, mut detected) = (0, 0);
    for _ in 0..100 {
        let mut bad = ser.clone();
        bad.flip(stream.random_range(0..ser.len()));
        match channel_replay(&bad) {
            Err(Error::MalformedTranscript(_)) => rejected += 1,
            Err(e) => panic!("unexpected error {e}"),
            Ok(msgs) => {
                assert_ne!(Transcript { messages: msgs }.digest(), digest);
                detected += 1;
            }
        }
    }
    assert_eq!(rejected + detected, 100);
}

#[test]
fn runs_are_deterministic() {
    let o = oracle(6);
    let (x, y) = flipped_pair(4, 1, 6, 2);
    let a = run_protocol_a(&o, &x, &y, Rational::new(1, 5), 77).unwrap();
    let fresh = oracle(6);
    let b = run_protocol_a(&fresh, &x, &y, Rational::new(1, 5), 77).unwrap();
    assert_eq!(a, b);
    let c = run_protocol_a(&o, &x, &y, Rational::new(1, 5), 78).unwrap();
    assert_ne!(a.transcript, c.transcript);

    let o4 = oracle(4);
    let setup = SetupB::new(micro_extractor(), Rational::new(1, 5), 1).unwrap();
    let b1 = run_protocol_b(&o4, &bs("0110"), &bs("0111"), &setup, 5).unwrap();
    let b2 = run_protocol_b(&oracle(4), &bs("0110"), &bs("0111"), &setup, 5).unwrap();
    assert_eq!(b1, b2);
}

#[test]
fn transcript_file_round_trip() {
    let o = oracle(4);
    let r = run_protocol_a(&o, &bs("0110"), &bs("0100"), Rational::new(1, 4), 3).unwrap();
    let f = r.transcript_file();
    let back = TranscriptFile::from_text(&f.to_text()).unwrap();
    assert_eq!(back, f);
    assert_eq!(back.digest(), f.digest());
}
