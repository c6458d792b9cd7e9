use super::report::Recorder;
use super::{LawCase, LawId};
use crate::error::Result;
use crate::linalg::svd_matrix_oracle;
use crate::nuclear::{
    caratheodory_max_atoms, duality_witness_decomposition, nuclear_bracket, tuple_beta_star, NuclearSolution,
    TupleDecomposition,
};
use crate::spectral::{
    mode_upper_bounds, spectral_lower, spectral_upper, tuple_alpha_lower, tuple_alpha_mode_uppers, tuple_alpha_upper,
    tuple_alpha_value, Exponent, SolverConfig, Witness,
};
use crate::tensor::{
    mix_seed, random_factor, DenseTensor, Distribution, SimpleTensor, TensorSpace, TensorTuple, C64,
};

pub(super) fn run(case: &LawCase) -> Result<Recorder> {
    let mut rec = Recorder::new(case);
    let (s, t) = case.operands()?;
    let cfg = SolverConfig::default().with_seed(mix_seed(case.seed, 3));
    match case.law_id {
        LawId::FrobMult => frob_mult(&mut rec, &s.members()[0], &t.members()[0])?,
        LawId::SpecMult => spec_mult(&mut rec, &s, &t, case.alpha(), &cfg)?,
        LawId::NucMult => beta_mult(&mut rec, &s, &t, Exponent::ONE, &cfg)?,
        LawId::BetaMult => beta_mult(&mut rec, &s, &t, case.beta(), &cfg)?,
        LawId::DualIneq => dual_ineq(&mut rec, &s, &t, case.alpha(), &cfg)?,
        LawId::DualTight => dual_tight(&mut rec, &s, case.alpha(), &cfg)?,
        LawId::CrossDual => cross_dual(&mut rec, &s, &t, case.beta(), &cfg)?,
        LawId::DirsumNuc => dirsum_nuc(&mut rec, &s.members()[0], &t.members()[0], &cfg)?,
        LawId::DirsumSpec => dirsum_spec(&mut rec, &s.members()[0], &t.members()[0], &cfg)?,
        LawId::CaraBound => cara_bound(&mut rec, &s, case.beta(), case.seed, &cfg)?,
    }
    Ok(rec)
}

fn min_over(xs: impl IntoIterator<Item = f64>) -> f64 {
    xs.into_iter().fold(f64::INFINITY, f64::min)
}

fn max_over(xs: impl IntoIterator<Item = f64>) -> f64 {
    xs.into_iter().fold(0.0, f64::max)
}

/// Singular values when `x` is a single matrix.
fn matrix_oracle(x: &TensorTuple) -> Result<Option<Vec<f64>>> {
    if x.len() == 1 && x.space().order() == 2 {
        Ok(Some(svd_matrix_oracle(&x.members()[0])?))
    } else {
        Ok(None)
    }
}

fn cara(rec: &mut Recorder, label: &str, d: &TupleDecomposition) {
    let bound = caratheodory_max_atoms(&d.space, d.members());
    rec.at_most(format!("atoms({label}) <= dim_R U^r + 1"), d.len() as f64, bound as f64);
}

fn reconstructs(rec: &mut Recorder, label: &str, d: &TupleDecomposition, x: &TensorTuple) -> Result<()> {
    let dev = d.max_deviation(x)? / (1.0 + x.norm());
    rec.identity(format!("decomposition reconstructs {label}"), dev, 0.0);
    Ok(())
}

fn solve_beta(x: &TensorTuple, beta: Exponent, cfg: &SolverConfig) -> Result<NuclearSolution> {
    tuple_beta_star(x, &cfg.clone().with_beta(beta))
}

fn dual_witness(sol: &NuclearSolution) -> Option<&TensorTuple> {
    match &sol.bracket.lower_witness {
        Some(Witness::Dual(w)) => Some(w),
        _ => None,
    }
}

fn frob_mult(rec: &mut Recorder, a: &DenseTensor, b: &DenseTensor) -> Result<()> {
    let p = a.kron(b)?;
    rec.exact("||S||", a.norm());
    rec.exact("||T||", b.norm());
    rec.exact("||S ⊠ T||", p.norm());
    rec.identity("||S ⊠ T|| = ||S|| ||T||", p.norm(), a.norm() * b.norm());
    rec.identity("||S ⊠ T||^2 = ||S||^2 ||T||^2", p.norm_sqr(), a.norm_sqr() * b.norm_sqr());
    rec.hash_tensor(&p);
    Ok(())
}

fn spec_mult(rec: &mut Recorder, s: &TensorTuple, t: &TensorTuple, alpha: Exponent, cfg: &SolverConfig) -> Result<()> {
    let cfg = cfg.clone().with_alpha(alpha);
    let p = s.kron(t)?;
    let lo_s = tuple_alpha_lower(s, &cfg)?;
    let lo_t = tuple_alpha_lower(t, &cfg)?;
    let (up_s, up_t) = (tuple_alpha_upper(s, alpha), tuple_alpha_upper(t, alpha));
    let (ls, lt) = (lo_s.value.min(up_s), lo_t.value.min(up_t));
    let mut cfg_p = cfg.clone();
    if let (Some(u), Some(v)) = (&lo_s.witness, &lo_t.witness) {
        let w = u.kron(v)?;
        let fp = tuple_alpha_value(&p, &w, alpha)?;
        let fs = tuple_alpha_value(s, u, alpha)?;
        let ft = tuple_alpha_value(t, v, alpha)?;
        rec.identity("value at u ⊠ v factorizes", fp, fs * ft);
        rec.hash_simple(u);
        rec.hash_simple(v);
        cfg_p = cfg_p.with_warm_starts(vec![w]);
    }
    let lo_p = tuple_alpha_lower(&p, &cfg_p)?;
    let up_p = tuple_alpha_upper(&p, alpha);
    let lp = lo_p.value.min(up_p);
    if let Some(w) = &lo_p.witness {
        rec.hash_simple(w);
    }

    let (ms, mt, mp) = (
        tuple_alpha_mode_uppers(s, alpha),
        tuple_alpha_mode_uppers(t, alpha),
        tuple_alpha_mode_uppers(&p, alpha),
    );
    for e in 0..mp.len() {
        rec.identity(format!("mode {e} bound factorizes"), mp[e], ms[e] * mt[e]);
    }
    let matched = min_over((0..mp.len()).map(|e| ms[e] * mt[e]));

    rec.quantity("[S]_α", ls, up_s);
    rec.quantity("[T]_α", lt, up_t);
    rec.quantity("[S ⊠ T]_α", lp, up_p);
    rec.quantity("[S]_α [T]_α", ls * lt, up_s * up_t);
    rec.at_least("lower(S ⊠ T) >= lower(S) lower(T)", lp, ls * lt);
    rec.at_most("upper(S ⊠ T) <= min_e U_e(S) U_e(T)", up_p, matched);
    rec.intersect("bracket(S ⊠ T) meets the product interval", (lp, up_p), (ls * lt, up_s * up_t));

    if let (Some(a), Some(b), Some(c)) = (matrix_oracle(s)?, matrix_oracle(t)?, matrix_oracle(&p)?) {
        rec.identity("σ_max(S ⊠ T) = σ_max(S) σ_max(T)", c[0], a[0] * b[0]);
        rec.contains("bracket(S ⊠ T) contains the matrix oracle", lp, up_p, c[0]);
    }
    Ok(())
}

/// Lower end for `S ⊠ T` from the product witness `W ⊠ W'`, checked
/// against the mode-matched product of the factor lower bounds. Returns
/// the certified lower bound.
fn product_lower(
    rec: &mut Recorder,
    s: &TensorTuple,
    t: &TensorTuple,
    p: &TensorTuple,
    ws: Option<&TensorTuple>,
    wt: Option<&TensorTuple>,
    alpha: Exponent,
) -> Result<f64> {
    let (Some(ws), Some(wt)) = (ws, wt) else {
        // One factor is zero, hence so is the product.
        rec.identity("||S ⊠ T|| = 0 with a zero factor", p.norm(), 0.0);
        return Ok(0.0);
    };
    rec.hash_tuple(ws);
    rec.hash_tuple(wt);
    let wp = ws.kron(wt)?;
    let (ps, pt, pp) = (s.inner(ws)?.norm(), t.inner(wt)?.norm(), p.inner(&wp)?.norm());
    rec.identity("<S ⊠ T, W ⊠ W'> = <S, W> <T, W'>", pp, ps * pt);
    let (us, ut, up) = (
        tuple_alpha_mode_uppers(ws, alpha),
        tuple_alpha_mode_uppers(wt, alpha),
        tuple_alpha_mode_uppers(&wp, alpha),
    );
    for e in 0..up.len() {
        rec.identity(format!("witness mode {e} bound factorizes"), up[e], us[e] * ut[e]);
    }
    let lower = pp / tuple_alpha_upper(&wp, alpha);
    let matched = ps * pt / min_over((0..up.len()).map(|e| us[e] * ut[e]));
    rec.at_least("lower(S ⊠ T) >= mode-matched lower(S) lower(T)", lower, matched);
    Ok(lower)
}

fn beta_mult(rec: &mut Recorder, s: &TensorTuple, t: &TensorTuple, beta: Exponent, cfg: &SolverConfig) -> Result<()> {
    let alpha = beta.conjugate();
    let p = s.kron(t)?;
    let sol_s = solve_beta(s, beta, cfg)?;
    let sol_t = solve_beta(t, beta, cfg)?;
    let (ds, dt) = (&sol_s.decomposition, &sol_t.decomposition);
    cara(rec, "S", ds);
    cara(rec, "T", dt);
    let (bs, bt) = (&sol_s.bracket, &sol_t.bracket);

    let dp = ds.kron(dt, &p)?;
    rec.identity("cost of the product decomposition factorizes", dp.cost(), ds.cost() * dt.cost());
    reconstructs(rec, "S ⊠ T", &dp, &p)?;
    let mut reduced = dp.clone();
    reduced.reduce(&p);
    cara(rec, "S ⊠ T", &reduced);
    reconstructs(rec, "S ⊠ T after reduction", &reduced, &p)?;
    rec.at_most("reduction does not raise the cost", reduced.cost(), dp.cost());
    let up_p = dp.upper().min(reduced.upper());
    rec.at_most("upper(S ⊠ T) <= upper(S) upper(T)", up_p, bs.upper * bt.upper);

    let lo_p = product_lower(rec, s, t, &p, dual_witness(&sol_s), dual_witness(&sol_t), alpha)?.min(up_p);
    rec.bracket("[S]_β★", bs);
    rec.bracket("[T]_β★", bt);
    rec.quantity("[S ⊠ T]_β★", lo_p, up_p);
    rec.quantity("[S]_β★ [T]_β★", bs.lower * bt.lower, bs.upper * bt.upper);
    rec.exact("atoms(S ⊠ T)", reduced.len() as f64);
    rec.intersect(
        "bracket(S ⊠ T) meets the product interval",
        (lo_p, up_p),
        (bs.lower * bt.lower, bs.upper * bt.upper),
    );

    if let (Some(a), Some(b), Some(c)) = (matrix_oracle(s)?, matrix_oracle(t)?, matrix_oracle(&p)?) {
        let (na, nb, nc): (f64, f64, f64) = (a.iter().sum(), b.iter().sum(), c.iter().sum());
        rec.exact("matrix oracle ||S ⊠ T||★", nc);
        rec.identity("oracle ||S ⊠ T||★ = ||S||★ ||T||★", nc, na * nb);
        rec.contains("bracket(S ⊠ T) contains the matrix oracle", lo_p, up_p, nc);
    }
    Ok(())
}

fn cross_dual(rec: &mut Recorder, s: &TensorTuple, t: &TensorTuple, beta: Exponent, cfg: &SolverConfig) -> Result<()> {
    let p = s.kron(t)?;
    let sol_s = solve_beta(s, beta, cfg)?;
    let sol_t = solve_beta(t, beta, cfg)?;
    cara(rec, "S", &sol_s.decomposition);
    cara(rec, "T", &sol_t.decomposition);
    let (bs, bt) = (&sol_s.bracket, &sol_t.bracket);
    let lo_p = product_lower(rec, s, t, &p, dual_witness(&sol_s), dual_witness(&sol_t), beta.conjugate())?;
    rec.bracket("[S]_β★", bs);
    rec.bracket("[T]_β★", bt);
    rec.quantity("lower [S ⊠ T]_β★", lo_p, f64::INFINITY);
    rec.at_most("lower(S ⊠ T) <= upper(S) upper(T)", lo_p, bs.upper * bt.upper);
    Ok(())
}

fn dual_ineq(rec: &mut Recorder, s: &TensorTuple, t: &TensorTuple, alpha: Exponent, cfg: &SolverConfig) -> Result<()> {
    let beta = alpha.conjugate();
    let cfg_a = cfg.clone().with_alpha(alpha);
    let lo_s = tuple_alpha_lower(s, &cfg_a)?;
    let up_s = tuple_alpha_upper(s, alpha);
    let sol_t = solve_beta(t, beta, cfg)?;
    cara(rec, "T", &sol_t.decomposition);
    reconstructs(rec, "T", &sol_t.decomposition, t)?;
    let pairing = s.inner(t)?.norm();
    rec.quantity("[S]_α", lo_s.value.min(up_s), up_s);
    rec.bracket("[T]_β★", &sol_t.bracket);
    rec.exact("|<S, T>|", pairing);
    rec.at_most("|<S, T>| <= upper_α(S) upper_β★(T)", pairing, up_s * sol_t.bracket.upper);
    if let Some(u) = &lo_s.witness {
        rec.hash_simple(u);
    }
    rec.hash_tuple(t);
    Ok(())
}

fn dual_tight(rec: &mut Recorder, s: &TensorTuple, alpha: Exponent, cfg: &SolverConfig) -> Result<()> {
    let lo = tuple_alpha_lower(s, &cfg.clone().with_alpha(alpha))?;
    let up = tuple_alpha_upper(s, alpha);
    let Some(u) = &lo.witness else {
        rec.identity("the zero tuple pairs to zero", s.norm(), 0.0);
        return Ok(());
    };
    rec.hash_simple(u);
    let dec = duality_witness_decomposition(s, u, alpha)?;
    cara(rec, "T", &dec);
    let t = dec.reconstruct_tuple();
    rec.hash_tuple(&t);

    let a: Vec<C64> = s.members().iter().map(|m| u.inner_with(m)).collect::<Result<_>>()?;
    let f = alpha.norm_c(&a);
    let mut k = 0;
    for (i, x) in a.iter().enumerate() {
        if x.norm() > a[k].norm() {
            k = i;
        }
    }
    for (i, (si, ti)) in s.members().iter().zip(t.members()).enumerate() {
        let got = si.inner(ti)?.norm();
        let want = match (alpha.is_infinite(), i == k) {
            (true, true) => a[k].norm_sqr(),
            (true, false) => 0.0,
            _ => a[i].norm().powf(alpha.value()),
        };
        rec.identity(format!("|<S_{i}, T_{i}>| = |<S_{i}, u>|^α"), got, want);
    }
    let pairing = s.inner(&t)?.norm();
    let cost = dec.cost();
    rec.identity("|<S, T>| = f(u) cost(T)", pairing, f * cost);
    rec.at_least("|<S, T>| >= lower_α(S) cost(T)", pairing, lo.value * cost);
    rec.at_most("|<S, T>| <= upper_α(S) cost(T)", pairing, up * cost);
    rec.quantity("[S]_α", lo.value.min(up), up);
    rec.quantity("[T]_β★", pairing / up, cost);
    rec.exact("|<S, T>|", pairing);
    Ok(())
}

fn dirsum_nuc(rec: &mut Recorder, a: &DenseTensor, b: &DenseTensor, cfg: &SolverConfig) -> Result<()> {
    let sum = a.direct_sum(b)?;
    let sum_t = TensorTuple::single(sum.clone());
    let sol_a = nuclear_bracket(a, cfg)?;
    let sol_b = nuclear_bracket(b, cfg)?;
    let (da, db) = (&sol_a.decomposition, &sol_b.decomposition);
    cara(rec, "A", da);
    cara(rec, "B", db);
    let (ba, bb) = (&sol_a.bracket, &sol_b.bracket);

    let d = da.direct_sum(db)?;
    rec.identity("cost of the concatenated decomposition adds", d.cost(), da.cost() + db.cost());
    reconstructs(rec, "A ⊕ B", &d, &sum_t)?;
    cara(rec, "A ⊕ B", &d);
    let up = d.upper();
    rec.at_most("upper(A ⊕ B) <= upper(A) + upper(B)", up, ba.upper + bb.upper);

    // Witness W_A / σ_e(W_A) ⊕ W_B / σ_e(W_B) has mode-e bound exactly 1.
    let wa = dual_witness(&sol_a).map(|w| w.members()[0].clone());
    let wb = dual_witness(&sol_b).map(|w| w.members()[0].clone());
    let sig = |w: &Option<DenseTensor>| w.as_ref().map(mode_upper_bounds);
    let (sa, sb) = (sig(&wa), sig(&wb));
    let part = |w: &Option<DenseTensor>, s: &Option<Vec<f64>>, space: &TensorSpace, e: usize| match (w, s) {
        (Some(w), Some(s)) if s[e] > 0.0 => w.scaled(C64::new(1.0 / s[e], 0.0)),
        _ => DenseTensor::zeros(space.clone()),
    };
    let mut lower: f64 = 0.0;
    let mut matched: f64 = 0.0;
    for e in 0..a.space().order() {
        let (pa, pb) = (part(&wa, &sa, a.space(), e), part(&wb, &sb, b.space(), e));
        let we = pa.direct_sum(&pb)?;
        if we.is_zero() {
            continue;
        }
        rec.hash_tensor(&we);
        let split = a.inner(&pa)? + b.inner(&pb)?;
        let pairing = sum.inner(&we)?.norm();
        rec.identity(format!("mode {e} witness pairing adds"), pairing, split.norm());
        rec.identity(format!("mode {e} witness bound is 1"), mode_upper_bounds(&we)[e], 1.0);
        lower = lower.max(pairing / spectral_upper(&we));
        matched = matched.max(split.norm());
    }
    rec.at_least("lower(A ⊕ B) >= mode-matched lower(A) + lower(B)", lower, matched);
    let lower = lower.min(up);

    rec.bracket("||A||★", ba);
    rec.bracket("||B||★", bb);
    rec.quantity("||A ⊕ B||★", lower, up);
    rec.quantity("||A||★ + ||B||★", ba.lower + bb.lower, ba.upper + bb.upper);
    rec.intersect(
        "bracket(A ⊕ B) meets the sum interval",
        (lower, up),
        (ba.lower + bb.lower, ba.upper + bb.upper),
    );
    if a.space().order() == 2 {
        let (na, nb, ns): (f64, f64, f64) = (
            svd_matrix_oracle(a)?.iter().sum(),
            svd_matrix_oracle(b)?.iter().sum(),
            svd_matrix_oracle(&sum)?.iter().sum(),
        );
        rec.exact("matrix oracle ||A ⊕ B||★", ns);
        rec.identity("oracle ||A ⊕ B||★ = ||A||★ + ||B||★", ns, na + nb);
        rec.contains("bracket(A ⊕ B) contains the matrix oracle", lower, up, ns);
    }
    Ok(())
}

fn dirsum_spec(rec: &mut Recorder, a: &DenseTensor, b: &DenseTensor, cfg: &SolverConfig) -> Result<()> {
    let sum = a.direct_sum(b)?;
    let lo_a = spectral_lower(a, cfg)?;
    let lo_b = spectral_lower(b, cfg)?;
    let (ua, ub) = (spectral_upper(a), spectral_upper(b));
    let (la, lb) = (lo_a.value.min(ua), lo_b.value.min(ub));
    let mut warm = Vec::new();
    for (lo, x, other, leading) in [(&lo_a, a, b, true), (&lo_b, b, a, false)] {
        if let Some(u) = &lo.witness {
            let e = u.embed_direct_sum(other.space(), leading)?;
            let name = if leading { "embedded witness of A keeps its value" } else { "embedded witness of B keeps its value" };
            rec.identity(name, e.inner_with(&sum)?.norm(), u.inner_with(x)?.norm());
            rec.hash_simple(&e);
            warm.push(e);
        }
    }
    let lo_s = spectral_lower(&sum, &cfg.clone().with_warm_starts(warm))?;
    let us = spectral_upper(&sum);
    let ls = lo_s.value.min(us);

    let (ma, mb, ms) = (mode_upper_bounds(a), mode_upper_bounds(b), mode_upper_bounds(&sum));
    for e in 0..ms.len() {
        rec.identity(format!("mode {e} bound is the max"), ms[e], ma[e].max(mb[e]));
    }
    let matched = min_over((0..ms.len()).map(|e| ma[e].max(mb[e])));

    rec.quantity("||A||σ", la, ua);
    rec.quantity("||B||σ", lb, ub);
    rec.quantity("||A ⊕ B||σ", ls, us);
    rec.quantity("max(||A||σ, ||B||σ)", la.max(lb), ua.max(ub));
    rec.at_least("lower(A ⊕ B) >= max(lower(A), lower(B))", ls, la.max(lb));
    rec.at_most("upper(A ⊕ B) <= min_e max(σ_e(A), σ_e(B))", us, matched);
    rec.intersect("bracket(A ⊕ B) meets the max interval", (ls, us), (la.max(lb), ua.max(ub)));
    if a.space().order() == 2 {
        let (sa, sb, ss) = (svd_matrix_oracle(a)?[0], svd_matrix_oracle(b)?[0], svd_matrix_oracle(&sum)?[0]);
        rec.exact("matrix oracle ||A ⊕ B||σ", ss);
        rec.identity("oracle ||A ⊕ B||σ = max(||A||σ, ||B||σ)", ss, max_over([sa, sb]));
        rec.contains("bracket(A ⊕ B) contains the matrix oracle", ls, us, ss);
    }
    Ok(())
}

fn cara_bound(rec: &mut Recorder, s: &TensorTuple, beta: Exponent, seed: u64, cfg: &SolverConfig) -> Result<()> {
    let space = s.space().clone();
    let r = s.len();
    let bound = caratheodory_max_atoms(&space, r);
    rec.identity("bound = r dim_R U + 1", bound as f64, (r * space.real_dim() + 1) as f64);

    let sol = solve_beta(s, beta, cfg)?;
    cara(rec, "S", &sol.decomposition);
    reconstructs(rec, "S", &sol.decomposition, s)?;
    rec.bracket("[S]_β★", &sol.bracket);
    rec.exact("atoms(S)", sol.decomposition.len() as f64);

    // An overfull decomposition with random atoms must reduce to the bound
    // without raising its cost.
    let m = bound + 2;
    let atoms = (0..m)
        .map(|j| SimpleTensor::unit_from_factors(space.clone(), random_factor(&space, mix_seed(seed, 100 + j as u64))))
        .collect::<Result<Vec<_>>>()?;
    let coef_space = TensorSpace::new(vec![r * m], space.field())?;
    let draws = DenseTensor::random(&coef_space, mix_seed(seed, 99), Distribution::Gaussian).into_data();
    let coefficients: Vec<Vec<C64>> = draws.chunks(m).map(<[C64]>::to_vec).collect();
    let zero = TensorTuple::zeros(space.clone(), r)?;
    let target = TupleDecomposition::with_residuals(&zero, atoms.clone(), coefficients.clone(), beta)?.reconstruct_tuple();
    let over = TupleDecomposition::with_residuals(&target, atoms, coefficients, beta)?;
    let mut reduced = over.clone();
    reduced.reduce(&target);
    rec.exact("atoms(overfull)", over.len() as f64);
    rec.exact("atoms(reduced)", reduced.len() as f64);
    cara(rec, "reduced", &reduced);
    rec.at_most("reduction does not raise the cost", reduced.cost(), over.cost());
    reconstructs(rec, "the overfull target after reduction", &reduced, &target)?;
    rec.hash_tuple(&target);
    Ok(())
}
