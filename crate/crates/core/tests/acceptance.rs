//! Acceptance criteria AC-1 to AC-8.
//!
//! Runs without the libtest harness so every criterion prints exactly one
//! `[PASS]` or `[FAIL]` line. Exits non-zero if any criterion fails.

use std::collections::{BTreeMap, HashMap};
use std::panic::{self, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use spx_core::algebra::{rat, Matrix, Rational};
use spx_core::face_ring::{choose_lsop, ChainMonomial, FaceRing, FaceRingElement, RawMonomial};
use spx_core::generators::{
    boundary_simplex, corpus, cross_polytope, doubled_sphere, negative_corpus, parity_corpus, rp2,
    CorpusEntry,
};
use spx_core::homology::{
    all_chains, is_gorenstein_star, link_of_chain, order_complex, orient, permutation_sign, reduced_betti,
    HomologyError, ReducedBetti, SimplicialComplex,
};
use spx_core::index::{
    build_frames, class_monomial, facet_class_sums, has_interior_zero, ind, ind_t_value, lambda_of,
    restriction_congruence, ridge_pair, Frames,
};
use spx_core::SimplicialPoset;

type Outcome = Result<String, String>;

struct Criterion {
    id: &'static str,
    title: &'static str,
    limit: Duration,
    run: fn() -> Outcome,
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn frames_for(p: &SimplicialPoset, seed: u64) -> Result<Frames, String> {
    let orientation = orient(p).map_err(|e| format!("{}: {e}", p.name()))?;
    let lsop = choose_lsop(p, seed).map_err(|e| format!("{}: {e}", p.name()))?;
    Ok(build_frames(p, &lsop, &orientation))
}

fn everything() -> Vec<CorpusEntry> {
    let mut all = corpus();
    for e in parity_corpus() {
        if !all.iter().any(|a| a.spec == e.spec) {
            all.push(e);
        }
    }
    all
}

// AC-1

/// Name, constructor, expected h-vector, expected facet count.
type GeneratorCase = (String, Box<dyn Fn() -> SimplicialPoset>, Vec<i64>, usize);

fn generator_identities() -> Outcome {
    let limit = Duration::from_secs(1);
    let mut cases: Vec<GeneratorCase> = Vec::new();
    for d in 2..=5 {
        cases.push((format!("boundary-simplex:{d}"), Box::new(move || boundary_simplex(d)), vec![1; d + 1], d + 1));
    }
    for d in 2..=4 {
        let mut h = vec![0; d + 1];
        h[0] = 1;
        h[d] = 1;
        cases.push((format!("doubled-sphere:{d}"), Box::new(move || doubled_sphere(d)), h, 2));
    }
    cases.push(("cross-polytope:3".into(), Box::new(|| cross_polytope(3)), vec![1, 3, 3, 1], 8));
    for (name, build, h, facets) in &cases {
        let start = Instant::now();
        let p = build();
        ensure(p.validate().pass, || format!("{name} does not validate"))?;
        let got_h = p.h_vector();
        let f = p.f_vector();
        ensure(&got_h == h, || format!("{name}: h = {got_h:?}, want {h:?}"))?;
        let top = *f.last().unwrap() as usize;
        ensure(top == *facets, || format!("{name}: {top} facets, want {facets}"))?;
        ensure(got_h.iter().sum::<i64>() as usize == top, || format!("{name}: sum h != f_(d-1)"))?;
        let t = start.elapsed();
        ensure(t <= limit, || format!("{name} took {t:?}"))?;
    }
    Ok(format!("{} generator instances", cases.len()))
}

// AC-2

fn gorenstein_certification() -> Outcome {
    let mut checked = 0;
    for e in everything() {
        let r = is_gorenstein_star(&e.poset).map_err(|err| format!("{}: {err}", e.spec))?;
        ensure(r.pass, || format!("{} fails: {:?}", e.spec, r.failure))?;
        checked += 1;
    }
    let p = rp2();
    let r = is_gorenstein_star(&p).map_err(|e| e.to_string())?;
    let failure = r.failure.ok_or("rp2 passed the Gorenstein* test")?;
    let sphere = ReducedBetti(failure.betti.clone()).is_sphere(failure.expected_dim);
    ensure(!sphere || failure.link_dim != failure.expected_dim, || "rp2 witness looks like a sphere".into())?;
    match orient(&p) {
        Err(HomologyError::NonOrientable { ridge, facets }) => {
            ensure(p.rank_of(ridge) == p.rank() - 1, || "witness is not a ridge".into())?;
            ensure(facets.iter().all(|&y| p.le(ridge, y)), || "witness facets not above ridge".into())?;
        }
        other => return Err(format!("rp2 orientation: {other:?}")),
    }
    for e in negative_corpus() {
        let r = is_gorenstein_star(&e.poset).map_err(|err| format!("{}: {err}", e.spec))?;
        ensure(!r.pass, || format!("{} unexpectedly passes", e.spec))?;
    }
    Ok(format!("{checked} positives, rp2 refused with homology and ridge witnesses"))
}

// AC-3

fn polynomiality_suite() -> Outcome {
    let mut evaluations = 0usize;
    for e in everything().into_iter().filter(|e| e.poset.rank() <= 4) {
        let p = &e.poset;
        let d = p.rank();
        let ring = FaceRing::new(p);
        let bases: Vec<_> = (0..=d + 2).map(|k| ring.basis(k)).collect();
        for seed in 0..5 {
            let frames = frames_for(p, seed)?;
            for (k, basis) in bases.iter().enumerate() {
                for m in basis {
                    let alpha = FaceRingElement::monomial(m.clone(), Rational::one());
                    let value = ind_t_value(&frames, &alpha).map_err(|err| format!("{} seed {seed} {m}: {err}", e.spec))?;
                    let ok = value.is_zero()
                        || (k >= d && value.is_homogeneous() && value.degree() == Some((k - d) as u32));
                    ensure(ok, || format!("{} seed {seed} {m}: degree of {value}", e.spec))?;
                    evaluations += 1;
                }
            }
        }
    }
    Ok(format!("{evaluations} index evaluations, all polynomial"))
}

// AC-4

fn class_cross_check() -> Outcome {
    let mut classes = 0usize;
    for e in everything() {
        let p = &e.poset;
        let ring = FaceRing::new(p);
        let orientation = orient(p).map_err(|err| err.to_string())?;
        let mut magnitudes: Vec<BTreeMap<Vec<usize>, i64>> = Vec::new();
        for seed in 0..3 {
            let lsop = choose_lsop(p, seed).map_err(|err| err.to_string())?;
            let frames = build_frames(p, &lsop, &orientation);
            // combinatorial side, straight from the orientation: each facet
            // counts sgn(y) times the orientation its atom order induces
            let mut expected: BTreeMap<Vec<usize>, i64> = BTreeMap::new();
            for y in p.facets() {
                let det = lsop.facet_matrix(p, y).det().map_err(|err| err.to_string())?;
                let s = orientation.sign[&y]
                    * permutation_sign(&orientation.order[&y])
                    * if det.is_negative() { -1 } else { 1 };
                *expected.entry(p.atom_set(y).to_vec()).or_insert(0) += s;
            }
            let sums = facet_class_sums(&frames);
            ensure(sums.len() == expected.len(), || format!("{}: class count differs", e.spec))?;
            for (class, s) in &sums {
                ensure(expected[class] == s.sum, || format!("{} seed {seed}: frame sum {} vs {}", e.spec, s.sum, expected[class]))?;
                let v = ind(&frames, &class_monomial(&ring, &frames, class)).map_err(|err| err.to_string())?;
                ensure(v == rat(s.sum), || format!("{} seed {seed} class {:?}: ind {v} vs sum {}", e.spec, s.atoms, s.sum))?;
                classes += 1;
            }
            magnitudes.push(expected.into_iter().map(|(k, v)| (k, v.abs())).collect());
        }
        ensure(magnitudes.windows(2).all(|w| w[0] == w[1]), || format!("{}: |class sum| varies with seed", e.spec))?;
    }
    Ok(format!("{classes} class comparisons over 3 seeds"))
}

// AC-5

fn parity_theorem() -> Outcome {
    let mut instances = 0;
    let mut joins = 0;
    for e in parity_corpus() {
        let p = &e.poset;
        let h = p.h_vector();
        ensure(has_interior_zero(&h), || format!("{} has no interior zero in {h:?}", e.spec))?;
        let report = spx_core::index::verify_parity(p, 0).map_err(|err| format!("{}: {err}", e.spec))?;
        ensure(report.hypothesis_met, || format!("{}: hypothesis not detected", e.spec))?;
        ensure(report.even, || format!("{}: odd facet count {}", e.spec, report.facets))?;
        ensure(report.classes.iter().all(|c| c.sum == 0 && c.size % 2 == 0), || format!("{}: nonzero class sum", e.spec))?;
        instances += 1;
        if e.spec.to_string().starts_with("join") {
            joins += 1;
        }
    }
    ensure(joins >= 5, || format!("only {joins} join instances"))?;
    Ok(format!("{instances} posets ({joins} joins): every class sum 0, facet counts even"))
}

// AC-6

fn hilbert_cross_check() -> Outcome {
    let mut checks = 0;
    for e in everything().into_iter().filter(|e| e.gorenstein && e.poset.rank() <= 3) {
        let p = &e.poset;
        let d = p.rank();
        let h = p.h_vector();
        ensure((0..=d).all(|i| h[i] == h[d - i]), || format!("{}: h = {h:?} not symmetric", e.spec))?;
        let ring = FaceRing::new(p);
        for seed in 0..3 {
            let lsop = choose_lsop(p, seed).map_err(|err| err.to_string())?;
            for (i, &hi) in h.iter().enumerate() {
                let q = ring.quotient_graded_dimension(&lsop, i) as i64;
                ensure(q == hi, || format!("{} seed {seed}: dim_{i} = {q}, h_{i} = {hi}", e.spec))?;
                checks += 1;
            }
            let q = ring.quotient_graded_dimension(&lsop, d + 1);
            ensure(q == 0, || format!("{} seed {seed}: quotient nonzero in degree {}", e.spec, d + 1))?;
        }
    }
    Ok(format!("{checks} graded dimensions equal h"))
}

// AC-7

fn random_element(bases: &[Vec<ChainMonomial>], rng: &mut ChaCha8Rng) -> FaceRingElement {
    let mut out = FaceRingElement::zero();
    for _ in 0..rng.gen_range(1..=4) {
        let basis = &bases[rng.gen_range(0..bases.len())];
        if basis.is_empty() {
            continue;
        }
        let m = basis[rng.gen_range(0..basis.len())].clone();
        out.add_term(m, rat(rng.gen_range(-5..=5)));
    }
    out
}

fn sign_laws() -> Outcome {
    let mut ridges = 0;
    let mut same_class = 0;
    let mut congruences = 0;
    for e in everything() {
        let p = &e.poset;
        let ring = FaceRing::new(p);
        let frames = frames_for(p, 0)?;
        for z in p.ridges() {
            let ((y, _), (y2, _)) = ridge_pair(p, z).ok_or("ridge not in two facets")?;
            let lambda = lambda_of(p, &frames, z).map_err(|err| err.to_string())?;
            let (f, f2) = (frames.get(y).unwrap(), frames.get(y2).unwrap());
            ensure(lambda == rat(-f.sign * f2.sign), || format!("{} ridge {z}: lambda {lambda}", e.spec))?;
            if f.atoms() == f2.atoms() {
                ensure(f.m == f2.m && lambda.is_one(), || format!("{} ridge {z}: same-class frames differ", e.spec))?;
                same_class += 1;
            }
            ridges += 1;
        }
        let bases: Vec<Vec<ChainMonomial>> = (0..=p.rank()).map(|k| ring.basis(k)).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let alpha = random_element(&bases, &mut rng);
            for z in p.ridges() {
                ensure(restriction_congruence(p, &frames, z, &alpha), || format!("{} ridge {z}: {alpha}", e.spec))?;
                congruences += 1;
            }
        }
    }
    Ok(format!("{ridges} ridges ({same_class} same-class), {congruences} congruences"))
}

// AC-8

fn naive_rank(mut rows: Vec<Vec<Rational>>) -> usize {
    let mut rank = 0;
    let ncols = rows.first().map_or(0, Vec::len);
    for col in 0..ncols {
        let Some(pivot) = (rank..rows.len()).find(|&r| !rows[r][col].is_zero()) else {
            continue;
        };
        rows.swap(rank, pivot);
        let pivot_row = rows[rank].clone();
        for (r, row) in rows.iter_mut().enumerate() {
            if r != rank && !row[col].is_zero() {
                let factor = &row[col] / &pivot_row[col];
                for (x, p) in row[col..].iter_mut().zip(&pivot_row[col..]) {
                    *x -= p * &factor;
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Reduced Betti numbers from dense boundary matrices built straight from the
/// face lists, with the augmentation as the degree-0 map.
fn naive_betti(c: &SimplicialComplex) -> Vec<usize> {
    let top = c.dim();
    if top < 0 {
        return vec![1];
    }
    let top = top as usize;
    let counts: Vec<usize> = (0..=top).map(|k| c.faces(k).len()).collect();
    // rank of d_k : C_k -> C_{k-1}, with C_{-1} = Q
    let mut ranks = vec![0usize; top + 2];
    for (k, rank) in ranks.iter_mut().enumerate().take(top + 1) {
        let faces = c.faces(k);
        let rows: Vec<Vec<Rational>> = if k == 0 {
            vec![vec![Rational::one(); faces.len()]]
        } else {
            let lower = c.faces(k - 1);
            let index: HashMap<&Vec<usize>, usize> = lower.iter().enumerate().map(|(i, f)| (f, i)).collect();
            let mut m = vec![vec![Rational::zero(); faces.len()]; lower.len()];
            for (j, f) in faces.iter().enumerate() {
                for drop in 0..f.len() {
                    let mut g = f.clone();
                    g.remove(drop);
                    let sign = if drop % 2 == 0 { 1 } else { -1 };
                    m[index[&g]][j] = rat(sign);
                }
            }
            m
        };
        *rank = naive_rank(rows);
    }
    let mut betti = vec![1 - ranks[0]];
    for (k, count) in counts.iter().enumerate() {
        betti.push(count - ranks[k] - ranks[k + 1]);
    }
    betti
}

fn cofactor_det(m: &[Vec<Rational>]) -> Rational {
    let n = m.len();
    if n == 0 {
        return Rational::one();
    }
    let mut total = Rational::zero();
    for j in 0..n {
        let minor: Vec<Vec<Rational>> = m[1..]
            .iter()
            .map(|row| row.iter().enumerate().filter(|&(c, _)| c != j).map(|(_, v)| v.clone()).collect())
            .collect();
        let term = &m[0][j] * cofactor_det(&minor);
        if j % 2 == 0 {
            total += term;
        } else {
            total -= term;
        }
    }
    total
}

/// All multisets of nonzero elements with rank sum `degree`.
fn raw_monomials(p: &SimplicialPoset, degree: usize) -> Vec<RawMonomial> {
    fn grow(p: &SimplicialPoset, from: usize, left: usize, cur: &mut RawMonomial, out: &mut Vec<RawMonomial>) {
        if left == 0 {
            out.push(cur.clone());
            return;
        }
        for w in from..p.len() {
            let r = p.rank_of(w);
            if r == 0 || r > left {
                continue;
            }
            *cur.entry(w).or_insert(0) += 1;
            grow(p, w, left - r, cur, out);
            let e = cur.get_mut(&w).unwrap();
            *e -= 1;
            if *e == 0 {
                cur.remove(&w);
            }
        }
    }
    let mut out = Vec::new();
    grow(p, 1, degree, &mut RawMonomial::new(), &mut out);
    out
}

fn oracle_equivalence() -> Outcome {
    let mut complexes = 0;
    for e in everything().iter().chain(&negative_corpus()) {
        let p = &e.poset;
        let mut candidates = vec![order_complex(p)];
        candidates.extend(all_chains(p).iter().take(40).map(|s| link_of_chain(p, s)));
        for c in candidates.into_iter().filter(|c| c.vertices().len() <= 12) {
            let fast = reduced_betti(&c);
            let slow = naive_betti(&c);
            ensure(fast.0 == slow, || format!("{}: betti {:?} vs {slow:?}", e.spec, fast.0))?;
            complexes += 1;
        }
    }
    let mut degrees = 0;
    for e in everything().iter().filter(|e| e.poset.rank() <= 4) {
        let p = &e.poset;
        let ring = FaceRing::new(p);
        for k in 0..=p.rank() + 2 {
            let basis = ring.basis(k);
            let index: HashMap<_, usize> = basis.iter().cloned().enumerate().map(|(i, m)| (m, i)).collect();
            let mut reducer = spx_core::algebra::RowReducer::new();
            for raw in raw_monomials(p, k) {
                let nf = ring.reduce_raw(&raw);
                for (m, _) in nf.terms() {
                    ensure(index.contains_key(m), || format!("{}: {m} is not a basis monomial", e.spec))?;
                }
                reducer.insert(ring.coordinates(&nf, &index));
            }
            ensure(reducer.rank() == ring.graded_dimension(k), || {
                format!("{} degree {k}: rank {} vs {}", e.spec, reducer.rank(), basis.len())
            })?;
            degrees += 1;
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for case in 0..100 {
        let n = 1 + case % 5;
        let rows: Vec<Vec<Rational>> = (0..n).map(|_| (0..n).map(|_| rat(rng.gen_range(-9..=9))).collect()).collect();
        let fast = Matrix::from_rows(rows.clone()).unwrap().det().unwrap();
        let slow = cofactor_det(&rows);
        ensure(fast == slow, || format!("det mismatch on case {case}: {fast} vs {slow}"))?;
    }
    Ok(format!("{complexes} complexes, {degrees} graded pieces, 100 determinants"))
}

fn main() -> ExitCode {
    let criteria = [
        Criterion { id: "AC-1", title: "generator identities", limit: Duration::from_secs(9), run: generator_identities },
        Criterion { id: "AC-2", title: "Gorenstein* certification", limit: Duration::from_secs(30), run: gorenstein_certification },
        Criterion { id: "AC-3", title: "index map polynomiality", limit: Duration::from_secs(120), run: polynomiality_suite },
        Criterion { id: "AC-4", title: "class sums equal index values", limit: Duration::from_secs(30), run: class_cross_check },
        Criterion { id: "AC-5", title: "even facet count under a vanishing h-entry", limit: Duration::from_secs(60), run: parity_theorem },
        Criterion { id: "AC-6", title: "quotient Hilbert function equals h", limit: Duration::from_secs(120), run: hilbert_cross_check },
        Criterion { id: "AC-7", title: "ridge sign laws and restriction congruence", limit: Duration::from_secs(30), run: sign_laws },
        Criterion { id: "AC-8", title: "oracle equivalence", limit: Duration::from_secs(120), run: oracle_equivalence },
    ];
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for c in &criteria {
        let start = Instant::now();
        let outcome = panic::catch_unwind(AssertUnwindSafe(c.run)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into());
            Err(format!("panicked: {msg}"))
        });
        let elapsed = start.elapsed();
        let outcome = outcome.and_then(|detail| {
            if elapsed <= c.limit {
                Ok(detail)
            } else {
                Err(format!("{detail}; exceeded limit of {:?}", c.limit))
            }
        });
        match outcome {
            Ok(detail) => println!("[PASS] {} {} ({:.2?}, limit {:?}): {detail}", c.id, c.title, elapsed, c.limit),
            Err(why) => {
                failed += 1;
                println!("[FAIL] {} {} ({:.2?}, limit {:?}): {why}", c.id, c.title, elapsed, c.limit);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
