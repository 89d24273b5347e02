mod common;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use common::PolyField;
use sidon_core::brset::{brset_from_logs, extract_brset, is_br_set, projective_logs, ExtractOptions};
use sidon_core::dlog::BsgsTable;
use sidon_core::error::Error;
use sidon_core::field::{make_field, FieldCtx, FieldElement, GeneratorOptions};
use sidon_core::orbit::{verify_glk2_certificate, Matrix2};
use sidon_core::qpoly::LinearizedPoly;
use sidon_core::sidon::{is_r_sidon, is_sidon_intersection, DEFAULT_BUDGET};
use sidon_core::subspace::Subspace;

fn field(p: u32, n: u32) -> FieldCtx {
    make_field(p, 1, n, None).unwrap()
}

fn nonzero(ctx: &FieldCtx, rng: &mut ChaCha8Rng) -> FieldElement {
    loop {
        let a = ctx.random_element(rng);
        if !a.is_zero() {
            return a;
        }
    }
}

fn primitive(ctx: &FieldCtx, seed: u64) -> FieldElement {
    ctx.find_generator(
        1,
        &GeneratorOptions {
            primitive: true,
            norm: None,
            seed,
        },
    )
    .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn multiplication_matches_schoolbook(seed in any::<u64>(), which in 0usize..4) {
        let (p, n) = [(2, 9), (3, 6), (7, 4), (5, 3)][which];
        let ctx = field(p, n);
        let f = PolyField::of(&ctx);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = ctx.random_element(&mut rng);
        let b = ctx.random_element(&mut rng);
        prop_assert_eq!((&a * &b).coeffs().to_vec(), f.mul(a.coeffs(), b.coeffs()));
    }

    #[test]
    fn r_sidon_matches_definition(seed in any::<u64>(), which in 0usize..3, k in 1usize..4, r in 2usize..4) {
        let (p, n) = [(2, 9), (3, 6), (2, 8)][which];
        let ctx = field(p, n);
        let v = Subspace::random(&ctx, k, seed).unwrap();
        prop_assert_eq!(is_r_sidon(&v, r, DEFAULT_BUDGET).unwrap().verdict, common::r_sidon(&v, r));
    }

    #[test]
    fn intersection_criterion_matches_oracle(seed in any::<u64>(), which in 0usize..2, k in 1usize..5) {
        let (p, n) = [(2, 9), (3, 6)][which];
        let ctx = field(p, n);
        let v = Subspace::random(&ctx, k, seed).unwrap();
        let lib = is_sidon_intersection(&v, DEFAULT_BUDGET).unwrap().verdict;
        prop_assert_eq!(lib, common::sidon_by_intersections(&v));
        prop_assert_eq!(lib, common::r_sidon(&v, 2));
    }

    #[test]
    fn br_check_matches_sorted_sums(set in proptest::collection::btree_set(0u64..60, 1..7), r in 1usize..4, m in proptest::option::of(61u64..90)) {
        let set: Vec<u64> = set.into_iter().collect();
        let mut sums = Vec::new();
        let mut idx = vec![0usize; r];
        loop {
            let s: u64 = idx.iter().map(|&i| set[i]).sum();
            sums.push(m.map_or(s, |m| s % m));
            let mut j = r;
            while j > 0 && idx[j - 1] == set.len() - 1 { j -= 1; }
            if j == 0 { break; }
            idx[j - 1] += 1;
            let v0 = idx[j - 1];
            for x in &mut idx[j..] { *x = v0; }
        }
        let before = sums.len();
        sums.sort_unstable();
        sums.dedup();
        let check = is_br_set(&set, r, m, DEFAULT_BUDGET).unwrap();
        prop_assert_eq!(check.holds, sums.len() == before);
        if let Some((a, b)) = check.witness {
            let red = |x: u64| m.map_or(x, |m| x % m);
            prop_assert_ne!(&a, &b);
            prop_assert_eq!(red(a.iter().sum()), red(b.iter().sum()));
        }
    }

    /// Shifting a set by `c` shifts every `r`-sum by `rc`, a bijection.
    #[test]
    fn br_translation_invariance(set in proptest::collection::btree_set(0u64..200, 1..8), c in 0u64..500, r in 2usize..4) {
        let set: Vec<u64> = set.into_iter().collect();
        let shifted: Vec<u64> = set.iter().map(|x| x + c).collect();
        prop_assert_eq!(
            is_br_set(&set, r, None, DEFAULT_BUDGET).unwrap().holds,
            is_br_set(&shifted, r, None, DEFAULT_BUDGET).unwrap().holds
        );
        let m = 701;
        let modular: Vec<u64> = set.iter().map(|x| (x + c) % m).collect();
        prop_assert_eq!(
            is_br_set(&set, r, Some(m), DEFAULT_BUDGET).unwrap().holds,
            is_br_set(&modular, r, Some(m), DEFAULT_BUDGET).unwrap().holds
        );
    }
}

#[test]
fn subspace_enumeration_counts() {
    assert_eq!(
        common::all_subspaces(2, 6, 3).len() as u128,
        common::gaussian_binomial(2, 6, 3)
    );
    assert_eq!(common::gaussian_binomial(2, 6, 3), 1395);
    assert_eq!(
        common::all_subspaces(3, 4, 2).len() as u128,
        common::gaussian_binomial(3, 4, 2)
    );
}

/// `{u + u^2 γ : u ∈ F_8}` in `F_64`: the definition oracle agrees with the
/// library on every `γ ∉ F_8`, and finds no 2-Sidon member.
#[test]
fn quadratic_family_in_f64() {
    let ctx = field(2, 6);
    let f = LinearizedPoly::monomial(&ctx, 3, 1).unwrap();
    let mut checked = 0;
    for i in 0..64u128 {
        let g = ctx.element_from_index(i);
        if g.in_subfield(3).unwrap() {
            continue;
        }
        let v = f.v_f_gamma(&g).unwrap();
        assert_eq!(v.dim(), 3);
        let oracle2 = common::r_sidon(&v, 2);
        assert_eq!(is_r_sidon(&v, 2, DEFAULT_BUDGET).unwrap().verdict, oracle2);
        assert!(!oracle2);
        assert!(!common::r_sidon(&v, 3));
        checked += 1;
    }
    assert_eq!(checked, 56);
}

/// A 2-Sidon 3-space of `F_64` gives a 7-element `B_2`-set in `Z_63`.
#[test]
fn b2_extraction_in_f64() {
    let ctx = field(2, 6);
    let gamma = primitive(&ctx, 0);
    let v = (0..)
        .map(|s| Subspace::random(&ctx, 3, s).unwrap())
        .find(|v| common::r_sidon(v, 2))
        .unwrap();
    let set = extract_brset(&v, 2, &gamma, &ExtractOptions::default()).unwrap();
    assert_eq!(set.len(), 7);
    assert_eq!(set.modulus, Some(63));
    assert!(set.verified);
    assert_eq!(set.elements[0], 0);
    // sums checked independently
    let mut sums: Vec<u64> = Vec::new();
    for (i, a) in set.elements.iter().enumerate() {
        for b in &set.elements[i..] {
            sums.push((a + b) % 63);
        }
    }
    sums.sort_unstable();
    let n = sums.len();
    sums.dedup();
    assert_eq!(sums.len(), n);
    // a non-Sidon space is refused unless the caller vouches for it
    let bad = LinearizedPoly::monomial(&ctx, 3, 1).unwrap().v_f_gamma(&gamma).unwrap();
    assert_eq!(
        extract_brset(&bad, 2, &gamma, &ExtractOptions::default()),
        Err(Error::NotRSidon(2))
    );
}

/// Logs of `x` and `cx` for `c ∈ F_q^*` agree modulo `(q^n-1)/(q-1)`.
#[test]
fn brset_independent_of_representatives() {
    let ctx = field(3, 8);
    let gamma = primitive(&ctx, 2);
    let table = BsgsTable::new(&gamma).unwrap();
    let v = Subspace::random(&ctx, 3, 9).unwrap();
    let (logs, m) = projective_logs(&v, &table).unwrap();
    assert_eq!(m, (3u64.pow(8) - 1) / 2);
    let two = ctx.from_fp(2);
    let mut other: Vec<u64> = v
        .projective_points()
        .unwrap()
        .iter()
        .map(|x| table.log(&(x * &two)).unwrap() % m)
        .collect();
    let mut a = logs.clone();
    a.sort_unstable();
    other.sort_unstable();
    assert_eq!(a, other);
    // a translated set is a B_r-set exactly when the raw one is
    let opts = ExtractOptions {
        translate: false,
        assume_sidon: true,
        ..Default::default()
    };
    let raw = brset_from_logs(logs.clone(), m, 2, &opts).unwrap();
    let moved = brset_from_logs(
        logs,
        m,
        2,
        &ExtractOptions {
            assume_sidon: true,
            ..Default::default()
        },
    )
    .unwrap();
    assert_eq!(raw.verified, moved.verified);
    assert_eq!(raw.verified, is_r_sidon(&v, 2, DEFAULT_BUDGET).unwrap().verdict);
}

#[test]
fn discrete_logs_in_f3_16() {
    let ctx = field(3, 16);
    let gamma = primitive(&ctx, 0);
    let table = BsgsTable::new(&gamma).unwrap();
    assert_eq!(table.table_size(), 6561);
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..20 {
        let x = nonzero(&ctx, &mut rng);
        assert_eq!(gamma.pow(table.log(&x).unwrap()), x);
    }
}

/// `A = diag(c, b)` and the swap matrix carry `x^{q^s}` graphs to explicit
/// monomials, so the certificate can be built by hand.
#[test]
fn gl2_certificates() {
    let (q, k, t) = (3u32, 3usize, 4u32);
    let ctx = field(q, k as u32 * t);
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let gamma = ctx.find_generator(k, &GeneratorOptions::default()).unwrap();
    let f = LinearizedPoly::monomial(&ctx, k, 1).unwrap();
    let zero = ctx.zero();
    for sigma in [0usize, 2, 5] {
        let gs = gamma.frobenius_p(sigma);
        let c = loop {
            let c = ctx.random_subfield_element(k, &mut rng).unwrap();
            if !c.is_zero() {
                break c;
            }
        };
        let b = ctx.random_subfield_element(k, &mut rng).unwrap();
        if b.is_zero() {
            continue;
        }
        // (w c, g(w) b) = (x^σ, f(x)^σ)  ⇒  g(w) = (c^q / b) w^q
        let coeff = c.frobenius(1).div(&b);
        let g = LinearizedPoly::new(&ctx, k, vec![zero.clone(), coeff]).unwrap();
        let m: Matrix2 = [[c.clone(), zero.clone()], [zero.clone(), b.clone()]];
        let xi = (&b * &gs).div(&c);
        let chk = verify_glk2_certificate(&f, &g, &gamma, &xi, &m, sigma).unwrap();
        assert!(chk.holds, "sigma {sigma}");
        let wrong = &xi + &ctx.one();
        let bad = verify_glk2_certificate(&f, &g, &gamma, &wrong, &m, sigma).unwrap();
        assert!(!bad.xi_matches && !bad.holds);
    }
    // swap: (g(w), w) = (x, f(x)), so g = f^{-1} = x^{q^{k-1}}
    let one = ctx.one();
    let swap: Matrix2 = [[zero.clone(), one.clone()], [one.clone(), zero.clone()]];
    let g = LinearizedPoly::monomial(&ctx, k, k - 1).unwrap();
    let xi = gamma.inverse().unwrap();
    assert!(verify_glk2_certificate(&f, &g, &gamma, &xi, &swap, 0).unwrap().holds);
    let singular: Matrix2 = [[one.clone(), one.clone()], [one.clone(), one]];
    assert!(verify_glk2_certificate(&f, &g, &gamma, &xi, &singular, 0).is_err());
}
