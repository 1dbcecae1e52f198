use proptest::prelude::*;
use spinbragg::bragg_dynamics::PulseKind;
use spinbragg::constants::angular;
use spinbragg::polarizability::*;

fn hi(twice: i32) -> HalfInt {
    HalfInt::from_twice(twice)
}

fn sixj(t: [i32; 6]) -> f64 {
    wigner6j(hi(t[0]), hi(t[1]), hi(t[2]), hi(t[3]), hi(t[4]), hi(t[5]))
}

fn fact(n: i32) -> f64 {
    (1..=n).map(f64::from).product()
}

/// 3-j symbol from its own Racah sum, all arguments doubled.
fn threej(j: [i32; 3], m: [i32; 3]) -> f64 {
    if m.iter().sum::<i32>() != 0 {
        return 0.0;
    }
    for k in 0..3 {
        if m[k].abs() > j[k] || (j[k] + m[k]) % 2 != 0 {
            return 0.0;
        }
    }
    let [a, b, c] = j;
    if c < (a - b).abs() || c > a + b || (a + b + c) % 2 != 0 {
        return 0.0;
    }
    let h = |x: i32| x / 2;
    let tri =
        fact(h(a + b - c)) * fact(h(a - b + c)) * fact(h(-a + b + c)) / fact(h(a + b + c) + 1);
    let pre = (tri
        * fact(h(a + m[0]))
        * fact(h(a - m[0]))
        * fact(h(b + m[1]))
        * fact(h(b - m[1]))
        * fact(h(c + m[2]))
        * fact(h(c - m[2])))
    .sqrt();
    let mut sum = 0.0;
    for k in 0..=(a + b + c) {
        let d = [
            h(a + b - c) - k,
            h(a - m[0]) - k,
            h(b + m[1]) - k,
            h(c - b + m[0]) + k,
            h(c - a - m[1]) + k,
        ];
        if d.iter().any(|&x| x < 0) {
            continue;
        }
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        sum += sign / (fact(k) * d.iter().map(|&x| fact(x)).product::<f64>());
    }
    let phase = if h(a - b - m[2]).rem_euclid(2) == 0 {
        1.0
    } else {
        -1.0
    };
    phase * pre * sum
}

/// 6-j symbol as a contraction of four 3-j symbols over all projections.
fn sixj_by_contraction(t: [i32; 6]) -> f64 {
    let [j1, j2, j3, j4, j5, j6] = t;
    let range = |j: i32| (-j..=j).step_by(2);
    let mut sum = 0.0;
    for m1 in range(j1) {
        for m2 in range(j2) {
            let m3 = -m1 - m2;
            if m3.abs() > j3 {
                continue;
            }
            for m4 in range(j4) {
                for m5 in range(j5) {
                    let m6 = m5 - m1;
                    if m6.abs() > j6 || m4 + m2 - m6 != 0 || -m4 + m5 + m3 != 0 {
                        continue;
                    }
                    let exponent = (j1 - m1 + j2 - m2 + j3 - m3 + j4 - m4 + j5 - m5 + j6 - m6) / 2;
                    let sign = if exponent % 2 == 0 { 1.0 } else { -1.0 };
                    sum += sign
                        * threej([j1, j2, j3], [-m1, -m2, -m3])
                        * threej([j1, j5, j6], [m1, -m5, m6])
                        * threej([j4, j2, j6], [m4, m2, -m6])
                        * threej([j4, j5, j3], [-m4, m5, m3]);
                }
            }
        }
    }
    sum
}

/// All 24 images under column permutations and upper/lower swaps in pairs of columns.
fn symmetries(t: [i32; 6]) -> Vec<[i32; 6]> {
    let cols = [(t[0], t[3]), (t[1], t[4]), (t[2], t[5])];
    let perms = [
        [0, 1, 2],
        [0, 2, 1],
        [1, 0, 2],
        [1, 2, 0],
        [2, 0, 1],
        [2, 1, 0],
    ];
    let flips = [
        [false; 3],
        [true, true, false],
        [true, false, true],
        [false, true, true],
    ];
    let mut out = Vec::new();
    for p in perms {
        for f in flips {
            let c: Vec<(i32, i32)> = (0..3)
                .map(|k| {
                    let (u, l) = cols[p[k]];
                    if f[k] {
                        (l, u)
                    } else {
                        (u, l)
                    }
                })
                .collect();
            out.push([c[0].0, c[1].0, c[2].0, c[0].1, c[1].1, c[2].1]);
        }
    }
    out
}

#[test]
fn sixj_reference_values() {
    // Exact values from a computer-algebra evaluation.
    let cases: [([i32; 6], f64); 7] = [
        ([2, 2, 2, 1, 1, 1], -1.0 / 3.0),
        ([2, 2, 2, 1, 3, 1], -1.0 / 6.0),
        ([2, 0, 2, 1, 1, 1], 6f64.sqrt() / 6.0),
        ([2, 0, 2, 1, 3, 1], -(6f64.sqrt()) / 6.0),
        ([4, 2, 4, 1, 3, 1], -(5f64.sqrt()) / 10.0),
        ([3, 3, 2, 2, 2, 1], 10f64.sqrt() / 12.0),
        ([4, 4, 4, 4, 4, 4], -3.0 / 70.0),
    ];
    for (t, expected) in cases {
        assert!((sixj(t) - expected).abs() < 1e-15, "{t:?}: {}", sixj(t));
        assert!(
            (sixj_by_contraction(t) - expected).abs() < 1e-13,
            "oracle {t:?}"
        );
    }
}

#[test]
fn hyperfine_sixj_against_contraction() {
    // {F 1 F; J I J} for F = 1, 2 with J = 1/2, I = 3/2
    for f in [2, 4] {
        let t = [f, 2, f, 1, 3, 1];
        assert!((sixj(t) - sixj_by_contraction(t)).abs() < 1e-13);
    }
}

#[test]
fn string_arguments() {
    let v = wigner6j_str(["1", "1", "1", "1/2", "3/2", "1/2"]).unwrap();
    assert!((v + 1.0 / 6.0).abs() < 1e-15);
    assert!(wigner6j_str(["1", "1", "x", "1/2", "3/2", "1/2"]).is_err());
    assert_eq!(
        wigner6j_str(["1", "1", "3", "1/2", "3/2", "1/2"]).unwrap(),
        0.0
    );
}

fn valid_sixj() -> impl Strategy<Value = [i32; 6]> {
    proptest::array::uniform6(0i32..=9).prop_filter("triangle and parity", |t| {
        let ok = |a: i32, b: i32, c: i32| c >= (a - b).abs() && c <= a + b && (a + b + c) % 2 == 0;
        ok(t[0], t[1], t[2]) && ok(t[0], t[4], t[5]) && ok(t[3], t[1], t[5]) && ok(t[3], t[4], t[2])
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn sixj_has_24_symmetries(t in valid_sixj()) {
        let v = sixj(t);
        let images = symmetries(t);
        prop_assert_eq!(images.len(), 24);
        for s in images {
            prop_assert!((sixj(s) - v).abs() < 1e-13, "{:?} vs {:?}", s, t);
        }
    }

    #[test]
    fn sixj_matches_contraction(t in valid_sixj()) {
        prop_assert!((sixj(t) - sixj_by_contraction(t)).abs() < 1e-12);
    }

    #[test]
    fn scalar_rises_between_d_lines(a in 0.6f64..6.5, b in 0.6f64..6.5) {
        let rb = AtomSpecies::rubidium87();
        let d1 = rb.d1().unwrap().omega;
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        prop_assume!(hi - lo > 1e-6);
        let s_lo = scalar_polarizability(d1 + angular(lo * 1e12), &rb).unwrap().value;
        let s_hi = scalar_polarizability(d1 + angular(hi * 1e12), &rb).unwrap().value;
        prop_assert!(s_hi > s_lo);
    }
}

#[test]
fn scalar_zero_between_d_lines() {
    let rb = AtomSpecies::rubidium87();
    let bracket = default_zero_bracket(&rb).unwrap();
    let w0 = find_scalar_zero(&rb, bracket).unwrap();
    assert!(w0 > bracket.0 && w0 < bracket.1);
    let a = scalar_polarizability(w0, &rb).unwrap().value;
    assert!(a.abs() < 1e-6, "alpha_s(w0) = {a}");
    // Bisection result is the same from a reversed bracket.
    let w0r = find_scalar_zero(&rb, (bracket.1, bracket.0)).unwrap();
    assert_eq!(w0, w0r);
}

#[test]
fn zero_independent_of_common_dipole_scale() {
    let rb = AtomSpecies::rubidium87();
    let mut scaled = rb.clone();
    for l in &mut scaled.lines {
        l.reduced_dipole *= 1.7;
    }
    let bracket = default_zero_bracket(&rb).unwrap();
    let a = find_scalar_zero(&rb, bracket).unwrap();
    let b = find_scalar_zero(&scaled, bracket).unwrap();
    assert!((a - b).abs() < 1e-9 * a);
}

#[test]
fn rabi_and_field_inverse() {
    let rb = AtomSpecies::rubidium87();
    let w0 = find_scalar_zero(&rb, default_zero_bracket(&rb).unwrap()).unwrap();
    for kind in [PulseKind::BeamSplitter, PulseKind::Reflector] {
        let omega = if kind == PulseKind::BeamSplitter {
            w0
        } else {
            w0 * 1.001
        };
        let e0 = field_for_rabi(kind, &rb, omega, 1234.0).unwrap();
        let back = pulse_rabi_frequency(kind, &rb, omega, e0).unwrap();
        assert!((back - 1234.0).abs() < 1e-9 * 1234.0);
    }
}

#[test]
fn species_file_round_trip() {
    let dir = std::env::temp_dir().join(format!("spinbragg-species-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("rb87.toml");
    std::fs::write(&path, species::RB87_TOML).unwrap();
    let loaded = AtomSpecies::load(&path).unwrap();
    assert_eq!(loaded, AtomSpecies::rubidium87());
    std::fs::remove_dir_all(&dir).unwrap();
}
