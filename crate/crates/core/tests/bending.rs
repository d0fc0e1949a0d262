use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use growthlab::asymptotics::{zariski_span_rank, ZariskiSettings};
use growthlab::bending::{bend, bend_sweep, centralizer_generator, parse_q, write_sweep};
use growthlab::bundled;
use growthlab::enumerate::{BallOptions, GeneratorSystem, Tag, WordBall};
use growthlab::liegroup::{adjoint_exact, lie_algebra_basis, GMatrix, GramForm};
use growthlab::scalars::{QuadMatrix, QuadRational};

fn random_words(system: &GeneratorSystem, count: usize, seed: u64) -> Vec<Vec<usize>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let len = rng.gen_range(1..=12);
            (0..len).map(|_| rng.gen_range(0..system.len())).collect()
        })
        .collect()
}

fn is_gamma2(system: &GeneratorSystem, k: usize) -> bool {
    system.generators()[k].tag == Some(Tag::Gamma2)
}

/// Evaluate `w` in the unbent system with every maximal `Γ2` block conjugated by `a`.
fn blockwise_amalgam(system: &GeneratorSystem, w: &[usize], a: &GMatrix) -> GMatrix {
    let mut out = GMatrix::identity(system.n(), system.d());
    let mut i = 0;
    while i < w.len() {
        let side = is_gamma2(system, w[i]);
        let mut j = i;
        while j < w.len() && is_gamma2(system, w[j]) == side {
            j += 1;
        }
        let block = system.evaluate(&w[i..j]);
        out = out.mul(&if side { block.conjugate_by(a) } else { block });
        i = j;
    }
    out
}

#[test]
fn amalgam_bending_is_a_homomorphism() {
    let base = bundled::kleinian_amalgam().unwrap();
    for q in ["21/20", "6/5", "1/3"] {
        let q = parse_q(q, 1).unwrap();
        let bent = bend(&base, &q).unwrap();
        let a = centralizer_generator(3, 1).unwrap().a_q(&q).unwrap();
        for w in random_words(&base, 1000, 7) {
            assert_eq!(bent.evaluate(&w), blockwise_amalgam(&base, &w, &a), "word {w:?}");
        }
    }
}

#[test]
fn fuchsian_bending_is_a_homomorphism_over_its_field() {
    let base = bundled::fuchsian_amalgam().unwrap();
    let q = parse_q("11/10", base.d()).unwrap();
    let bent = bend(&base, &q).unwrap();
    let a = centralizer_generator(2, base.d()).unwrap().a_q(&q).unwrap();
    for w in random_words(&base, 1000, 8) {
        assert_eq!(bent.evaluate(&w), blockwise_amalgam(&base, &w, &a));
    }
}

#[test]
fn hnn_bending_is_a_homomorphism() {
    let base = bundled::kleinian_hnn().unwrap();
    let q = parse_q("11/10", 1).unwrap();
    let bent = bend(&base, &q).unwrap();
    let a = centralizer_generator(3, 1).unwrap().a_q(&q).unwrap();
    let a_inv = a.inverse();
    let s = base.index_of("s").unwrap();
    let s_inv = base.generators()[s].inverse;
    for w in random_words(&base, 1000, 9) {
        // Γ1 blocks evaluated unbent; each s becomes a·s and each s⁻¹ becomes s⁻¹·a⁻¹
        let mut out = GMatrix::identity(3, 1);
        let mut block: Vec<usize> = Vec::new();
        for &k in &w {
            if k == s || k == s_inv {
                out = out.mul(&base.evaluate(&block));
                block.clear();
                let g = &base.generators()[k].matrix;
                out = if k == s { out.mul(&a).mul(g) } else { out.mul(g).mul(&a_inv) };
            } else {
                block.push(k);
            }
        }
        out = out.mul(&base.evaluate(&block));
        assert_eq!(bent.evaluate(&w), out, "word {w:?}");
    }
}

#[test]
fn gamma1_elements_are_fixed_by_every_bend() {
    let base = bundled::kleinian_amalgam().unwrap();
    let qs: Vec<QuadRational> = ["1", "21/20", "11/10"].iter().map(|q| parse_q(q, 1).unwrap()).collect();
    let systems = bend_sweep(&base, &qs).unwrap();
    assert_eq!(systems.len(), 3);
    assert_eq!(systems[0].to_json_string(), base.to_json_string());
    let gamma1: Vec<usize> = (0..base.len())
        .filter(|&k| matches!(base.generators()[k].tag, Some(Tag::Gamma1) | Some(Tag::Delta)))
        .collect();
    let w: Vec<usize> = (0..9).map(|i| gamma1[(i * 5 + 1) % gamma1.len()]).collect();
    for s in &systems {
        assert_eq!(s.evaluate(&w), base.evaluate(&w));
    }
}

#[test]
fn sweep_manifest_hashes_its_files() {
    let dir = tempfile::tempdir().unwrap();
    let base = bundled::kleinian_amalgam().unwrap();
    let qs: Vec<QuadRational> = ["1", "21/20"].iter().map(|q| parse_q(q, 1).unwrap()).collect();
    let systems = bend_sweep(&base, &qs).unwrap();
    let path = write_sweep(&base, &qs, &systems, dir.path()).unwrap();
    let doc: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    let entries = doc["systems"].as_array().unwrap();
    assert_eq!(entries.len(), 2);
    assert_eq!(entries[1]["q"], "21/20");
    for e in entries {
        let text = std::fs::read(dir.path().join(e["file"].as_str().unwrap())).unwrap();
        let hash = hex::encode(<sha2::Sha256 as sha2::Digest>::digest(&text));
        assert_eq!(e["sha256"].as_str().unwrap(), hash);
    }
    let q1 = std::fs::read_to_string(dir.path().join("q1.json")).unwrap();
    assert_eq!(q1, base.to_json_string());
}

/// Exact rank over Q by fraction-free elimination on integer rows.
fn exact_rank(rows: Vec<Vec<QuadRational>>) -> usize {
    let mut m: Vec<Vec<BigInt>> = rows
        .into_iter()
        .map(|r| {
            assert!(r.iter().all(|x| x.is_rational()));
            let l = r.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.den()));
            r.iter().map(|x| x.a() * (&l / x.den())).collect()
        })
        .collect();
    let cols = m.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..m.len()).find(|&i| !m[i][c].is_zero()) else { continue };
        m.swap(rank, p);
        let pivot = m[rank].clone();
        for i in rank + 1..m.len() {
            if m[i][c].is_zero() {
                continue;
            }
            let f = m[i][c].clone();
            let row: Vec<BigInt> = m[i].iter().zip(&pivot).map(|(x, y)| x * &pivot[c] - y * &f).collect();
            let g = row.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
            m[i] = if g.is_zero() { row } else { row.into_iter().map(|x| x / &g).collect() };
        }
        rank += 1;
    }
    rank
}

fn flattened_adjoints(elements: &[GMatrix]) -> Vec<Vec<QuadRational>> {
    elements.iter().map(|g| adjoint_exact(g).entries()).collect()
}

#[test]
fn unbent_span_rank_matches_the_exact_oracle() {
    let base = bundled::kleinian_amalgam().unwrap();
    let ball = WordBall::build(&base, &BallOptions::new(4)).unwrap();
    let r0 = exact_rank(flattened_adjoints(ball.elements()));
    // so(3,1) is irreducible with a complex structure (span 36/2) plus the standard 4-dim piece (16)
    assert_eq!(r0, 34);
    let numeric = zariski_span_rank(&ball, &ZariskiSettings { sample_size: 1000, max_layer: 4, rel_tol: 1e-8 }, 1);
    assert_eq!(numeric.rank, r0);
    let bianchi = WordBall::build(&bundled::gaussian_bianchi().unwrap(), &BallOptions::new(4)).unwrap();
    assert_eq!(exact_rank(flattened_adjoints(bianchi.elements())), 34);
}

#[test]
fn bent_span_rank_is_full_by_the_exact_oracle() {
    let base = bundled::kleinian_amalgam().unwrap();
    let bent = bend(&base, &parse_q("21/20", 1).unwrap()).unwrap();
    let ball = WordBall::build(&bent, &BallOptions::new(4)).unwrap();
    assert_eq!(exact_rank(flattened_adjoints(ball.elements())), 100);
    let numeric = zariski_span_rank(&ball, &ZariskiSettings::default(), 1);
    assert_eq!(numeric.rank, 100);
}

/// Cayley transform `(I − X)⁻¹(I + X)` of a random rational `X ∈ so(Q)`.
fn cayley_element(form: &GramForm, rng: &mut ChaCha8Rng) -> GMatrix {
    let dim = form.dim();
    loop {
        let mut x = QuadMatrix::zeros(dim, 1);
        for b in lie_algebra_basis(form) {
            let c = QuadRational::from_i64s(rng.gen_range(-3..=3), 0, rng.gen_range(1..=4), 1).unwrap();
            x = x.add(&b.scale(&c));
        }
        let id = QuadMatrix::identity(dim, 1);
        if let Ok(inv) = id.sub(&x).inverse() {
            return GMatrix::certify(form.n, inv.mul(&id.add(&x)), "cayley").unwrap();
        }
    }
}

#[test]
fn ambient_samples_span_the_full_endomorphism_algebra() {
    let form = GramForm::new(3, 1).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let sample: Vec<GMatrix> = (0..110).map(|_| cayley_element(&form, &mut rng)).collect();
    assert_eq!(exact_rank(flattened_adjoints(&sample)), 100);
}
