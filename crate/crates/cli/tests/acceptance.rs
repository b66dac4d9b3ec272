//! The acceptance suite: eleven criteria, one PASS/FAIL line each. Runs
//! without the libtest harness so the lines come out in order.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::sync::Arc;
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use clocksys::behavior::{
    check_behavior, check_representability, compare_stoch_predicates, enumerate_stoch_behaviors, oracle_behaviors,
    pushforward_behavior, stoch_candidate_count, StochBehavior,
};
use clocksys::clock::{
    build_deterministic_clock, build_graph_clock, build_nondet_linear_clock, build_stochastic_clock,
    one_loop_relabeling, structurally_equal, ClockSystem, Graph, Horizon,
};
use clocksys::filtercat::{
    enumerate_filtered_maps, glue_behavior, independent_pullback, independent_pullback_plain, induced_pullback_map,
    is_immersion_kernel, is_immersion_martingale, is_independent_square, pullback_behavior, FilteredMap, FilteredSpace,
    ProbMap, ProbSquare,
};
use clocksys::finprob::{check_pushforward_lemma, FinProbSpace, Filtration, Partition};
use clocksys::gen::{
    all_filtrations, all_measures, all_systems, random_filtration, random_partition, random_space, random_system,
};
use clocksys::interface::small_arenas;
use clocksys::machine::enumerate_system_morphisms;
use clocksys::{ratio, Arena, Dist, EnumConfig, Error, FinSet, MonadTag, MonadValue, MonadicSystem, Rational};

type Outcome = Result<String, String>;

fn h(t: usize) -> Horizon {
    Horizon::new(t).unwrap()
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn criterion_1() -> Outcome {
    let cfg = EnumConfig::default();
    let clock = build_deterministic_clock(h(3));
    let systems = all_systems(MonadTag::Identity, 2, 2, 2);
    for s in &systems {
        let s = Arc::new(s.clone());
        let r = check_representability(&clock, &s, &cfg).map_err(|e| e.to_string())?;
        ensure(r.bijection, || format!("no bijection for {s:?}: {:?}", r.witness))?;
    }
    Ok(format!("{} systems at T = 3", systems.len()))
}

fn coin() -> FinProbSpace {
    FinProbSpace::uniform(FinSet::from_names(&["H", "T"]).unwrap()).unwrap()
}

fn stoch_instance(space: &FinProbSpace, filt: &Filtration, s: MonadicSystem, cfg: &EnumConfig) -> Result<(u128, usize), String> {
    let clock = build_stochastic_clock(space, filt, h(filt.len())).map_err(|e| e.to_string())?;
    let s = Arc::new(s);
    let cmp = compare_stoch_predicates(&clock, &s, cfg).map_err(|e| e.to_string())?;
    if let Some(d) = cmp.disagreement {
        return Err(format!("predicates disagree: {d}"));
    }
    let rep = check_representability(&clock, &s, cfg).map_err(|e| e.to_string())?;
    ensure(rep.bijection, || format!("no bijection: {:?}", rep.witness))?;
    ensure(rep.behaviors == cmp.accepted, || "oracle count differs from accepted candidates".into())?;
    Ok((cmp.candidates, cmp.accepted))
}

fn criterion_2() -> Outcome {
    let cfg = EnumConfig::default();
    let mut r = rng(2);
    let arenas: Vec<Arena> = small_arenas(2, 2);
    let (mut instances, mut candidates) = (0usize, 0u128);

    // Planted: a fair coin over flips, and a deterministic walk.
    let point = FinSet::point();
    let coins = FinSet::from_names(&["H", "T"]).unwrap();
    let fair = MonadValue::Dist(Dist::uniform(&[0, 1]).unwrap());
    let flip = MonadicSystem::new(
        MonadTag::Dist,
        coins.clone(),
        Arena::new(coins.clone(), point.clone()).unwrap(),
        vec![0, 1],
        vec![fair.clone(), fair],
    )
    .unwrap();
    let sticky = MonadicSystem::new(
        MonadTag::Dist,
        coins.clone(),
        Arena::new(coins.clone(), coins.clone()).unwrap(),
        vec![0, 1],
        vec![
            MonadValue::Dist(Dist::point(0)),
            MonadValue::Dist(Dist::point(1)),
            MonadValue::Dist(Dist::point(1)),
            MonadValue::Dist(Dist::point(0)),
        ],
    )
    .unwrap();
    for t in 1..=2 {
        let flips = FilteredSpace::iid_power(&coin(), t).unwrap();
        for s in [&flip, &sticky] {
            let (c, _) = stoch_instance(&flips.space, &flips.filt, s.clone(), &cfg)?;
            candidates += c;
            instances += 1;
        }
    }

    while instances < 60 {
        let n = r.gen_range(1..=4);
        let t = r.gen_range(1..=3);
        let allow_null = r.gen_bool(0.5);
        let space = random_space(&mut r, n, 4, allow_null);
        let filt = random_filtration(&mut r, n, t);
        let arena = arenas.choose(&mut r).unwrap();
        let nx = r.gen_range(1..=2);
        let s = random_system(&mut r, MonadTag::Dist, nx, arena);
        if stoch_candidate_count(&s, &space, &filt, h(t)) > 1 << 16 {
            continue;
        }
        let (c, _) = stoch_instance(&space, &filt, s, &cfg)?;
        candidates += c;
        instances += 1;
    }
    Ok(format!("{instances} instances, {candidates} adapted candidates compared"))
}

fn criterion_3() -> Outcome {
    let one = FinProbSpace::uniform(FinSet::point()).unwrap();
    for t in 1..=5 {
        let stoch = build_stochastic_clock(&one, &Filtration::constant(Partition::coarsest(1), t), h(t)).unwrap();
        let det = build_deterministic_clock(h(t));
        ensure(structurally_equal(&stoch.system, &det.system), || format!("clocks differ at T = {t}"))?;
    }
    Ok("T = 1..5".into())
}

fn criterion_4() -> Outcome {
    let mut r = rng(4);
    for i in 0..200 {
        let n = r.gen_range(1..=5);
        let allow_null = r.gen_bool(0.5);
        let space = random_space(&mut r, n, 4, allow_null);
        let g = random_partition(&mut r, n, 3);
        let k = r.gen_range(1..=4);
        let m = r.gen_range(1..=3);
        let x: Vec<usize> = (0..n).map(|_| r.gen_range(0..k)).collect();
        let f: Vec<usize> = (0..k).map(|_| r.gen_range(0..m)).collect();
        ensure(check_pushforward_lemma(&space, &g, &x, &f), || format!("instance {i} fails"))?;
    }
    Ok("200 instances, |Ω| ≤ 5".into())
}

fn named(n: usize) -> FinSet {
    FinSet::from_names(&(0..n).map(|i| format!("w{i}")).collect::<Vec<_>>()).unwrap()
}

fn criterion_5() -> Outcome {
    let cfg = EnumConfig::default();
    let mut spaces: Vec<Vec<FilteredSpace>> = vec![Vec::new(); 3];
    for t in 1..=2 {
        for n in 1..=3 {
            for m in all_measures(n, 4) {
                let p = FinProbSpace::new(named(n), m).unwrap();
                for f in all_filtrations(n, t) {
                    spaces[t].push(FilteredSpace::new(p.clone(), f).unwrap());
                }
            }
        }
    }
    let (mut maps, mut immersions) = (0usize, 0usize);
    for list in &spaces {
        for a in list {
            for b in list {
                for phi in enumerate_filtered_maps(a, b, &cfg).map_err(|e| e.to_string())? {
                    let k = is_immersion_kernel(&phi);
                    let m = is_immersion_martingale(&phi, &cfg).map_err(|e| e.to_string())?.immersion;
                    ensure(k == m, || format!("criteria disagree on {phi:?}"))?;
                    maps += 1;
                    immersions += k as usize;
                }
            }
        }
    }
    Ok(format!("{maps} filtered maps, {immersions} immersions"))
}

fn projection(prod: &FilteredSpace, a: &FilteredSpace, b_len: usize) -> FilteredMap {
    let table = (0..prod.space.len()).map(|k| k / b_len).collect();
    FilteredMap::new(prod.clone(), a.clone(), table).unwrap()
}

fn random_filtered(r: &mut ChaCha8Rng, n: usize, t: usize) -> FilteredSpace {
    let allow_null = r.gen_bool(0.3);
    let space = random_space(r, n, 4, allow_null);
    FilteredSpace::new(space, random_filtration(r, n, t)).unwrap()
}

/// An immersion into `base`: a product projection, or a random immersion
/// found by enumeration.
fn random_immersion(r: &mut ChaCha8Rng, base: &FilteredSpace, max_src: usize, cfg: &EnumConfig) -> Option<FilteredMap> {
    let t = base.len();
    if r.gen_bool(0.5) && base.space.len() * 2 <= max_src {
        let n = r.gen_range(1..=max_src / base.space.len());
        let e = random_filtered(r, n, t);
        let prod = FilteredSpace::product(base, &e).unwrap();
        return Some(projection(&prod, base, e.space.len()));
    }
    for _ in 0..20 {
        let n = r.gen_range(1..=max_src);
        let src = random_filtered(r, n, t);
        let found: Vec<FilteredMap> = enumerate_filtered_maps(&src, base, cfg)
            .ok()?
            .into_iter()
            .filter(is_immersion_kernel)
            .collect();
        if let Some(m) = found.choose(r) {
            return Some(m.clone());
        }
    }
    None
}

fn criterion_6() -> Outcome {
    let cfg = EnumConfig::default();
    let mut r = rng(6);
    let mut cospans = 0;
    while cospans < 60 {
        let t = r.gen_range(1..=2);
        let n = r.gen_range(1..=2);
        let base = random_filtered(&mut r, n, t);
        let (Some(f), Some(g)) = (random_immersion(&mut r, &base, 4, &cfg), random_immersion(&mut r, &base, 4, &cfg)) else {
            continue;
        };
        let pb = independent_pullback(&f, &g).map_err(|e| e.to_string())?;
        for (side, leg) in [("left", &pb.left), ("right", &pb.right)] {
            let k = is_immersion_kernel(leg);
            let m = is_immersion_martingale(leg, &cfg).map_err(|e| e.to_string())?.immersion;
            ensure(k && m, || format!("{side} projection is not an immersion (kernel {k}, martingale {m}) for {f:?} / {g:?}"))?;
        }
        cospans += 1;
    }
    Ok(format!("{cospans} cospans, both legs pass both checks"))
}

/// Splits each point into one or two points, returning the finer space and
/// the map back.
fn refine(r: &mut ChaCha8Rng, space: &FinProbSpace) -> ProbMap {
    let mut labels = Vec::new();
    let mut measure = Vec::new();
    let mut back = Vec::new();
    for w in 0..space.len() {
        let p = space.prob(w);
        let parts: Vec<Rational> = if r.gen_bool(0.5) {
            let a = ratio(r.gen_range(0..=4), 4);
            vec![p * a, p * (Rational::from_integer(1) - a)]
        } else {
            vec![p]
        };
        for (j, q) in parts.into_iter().enumerate() {
            labels.push(format!("{}.{j}", space.omega.label(w)));
            measure.push(q);
            back.push(w);
        }
    }
    let fine = FinProbSpace::new(FinSet::from_names(&labels).unwrap(), measure).unwrap();
    ProbMap::new(fine, space.clone(), back).unwrap()
}

/// A measure-preserving map onto a random quotient.
fn quotient(r: &mut ChaCha8Rng, space: &FinProbSpace) -> ProbMap {
    let m = r.gen_range(1..=space.len());
    let table: Vec<usize> = (0..space.len()).map(|w| if w < m { w } else { r.gen_range(0..m) }).collect();
    let mut measure = vec![Rational::from_integer(0); m];
    for (w, &y) in table.iter().enumerate() {
        measure[y] += space.prob(w);
    }
    let dst = FinProbSpace::new(named(m), measure).unwrap();
    ProbMap::new(space.clone(), dst, table).unwrap()
}

fn criterion_7() -> Outcome {
    let mut r = rng(7);
    let mut instances = 0;
    while instances < 40 {
        // Λ₁ → Λ₀, then Γ₀, Ω₀ over Λ₀.
        let n = r.gen_range(1..=3);
        let allow_null = r.gen_bool(0.3);
        let l1 = random_space(&mut r, n, 4, allow_null);
        let lam = quotient(&mut r, &l1);
        let g0 = refine(&mut r, &lam.dst);
        let o0 = refine(&mut r, &lam.dst);
        // Γ₁ and Ω₁ sit over both; independent pullbacks give independent
        // squares, and refining the corner keeps them independent.
        let gp = independent_pullback_plain(&g0, &lam).map_err(|e| e.to_string())?;
        let op = independent_pullback_plain(&o0, &lam).map_err(|e| e.to_string())?;
        let (g_top, g_left) = corner(&mut r, &gp.left, &gp.right);
        let (o_top, o_left) = corner(&mut r, &op.left, &op.right);
        for (top, left, right) in [(&g_top, &g_left, &g0), (&o_top, &o_left, &o0)] {
            let sq = ProbSquare::new(top.clone(), left.clone(), right.clone(), lam.clone()).map_err(|e| e.to_string())?;
            ensure(is_independent_square(&sq), || "generated hypothesis square is not independent".into())?;
        }
        if g_left.src.len() * o_left.src.len() > 400 {
            continue;
        }
        let pb1 = independent_pullback_plain(&g_left, &o_left).map_err(|e| e.to_string())?;
        let pb0 = independent_pullback_plain(&g0, &o0).map_err(|e| e.to_string())?;
        let induced = induced_pullback_map(&pb1, &pb0, &g_top, &o_top).map_err(|e| e.to_string())?;
        let sq = ProbSquare::new(induced, pb1.left.clone(), pb0.left.clone(), g_top.clone()).map_err(|e| e.to_string())?;
        ensure(is_independent_square(&sq), || format!("induced square is not independent (instance {instances})"))?;
        instances += 1;
    }
    Ok(format!("{instances} instances"))
}

/// Optionally refines the corner of a pullback, composing both legs.
fn corner(r: &mut ChaCha8Rng, top: &ProbMap, left: &ProbMap) -> (ProbMap, ProbMap) {
    if r.gen_bool(0.5) {
        let fine = refine(r, &top.src);
        (fine.then(top).unwrap(), fine.then(left).unwrap())
    } else {
        (top.clone(), left.clone())
    }
}

fn agree_on_positive(space: &FinProbSpace, a: &StochBehavior, b: &StochBehavior) -> bool {
    let same = |p: &clocksys::finprob::AdaptedProcess, q: &clocksys::finprob::AdaptedProcess| {
        p.len() == q.len()
            && (0..p.len()).all(|i| (0..space.len()).all(|w| space.prob(w) == Rational::from_integer(0) || p.step(i)[w] == q.step(i)[w]))
    };
    same(&a.xs, &b.xs) && same(&a.outs, &b.outs) && same(&a.ins, &b.ins)
}

fn invariant(phi: &FilteredMap, b: &StochBehavior) -> bool {
    let sp = &phi.src.space;
    let positive: Vec<usize> = (0..sp.len()).filter(|&g| sp.prob(g) != Rational::from_integer(0)).collect();
    [&b.xs, &b.outs, &b.ins].iter().all(|p| {
        (0..p.len()).all(|i| {
            positive.iter().all(|&a| {
                positive.iter().all(|&c| phi.apply(a) != phi.apply(c) || p.step(i)[a] == p.step(i)[c])
            })
        })
    })
}

fn criterion_8() -> Outcome {
    let cfg = EnumConfig::with_budget(1 << 16);
    let arenas = small_arenas(2, 2);
    let mut r = rng(8);
    let (mut glued, mut refused, mut attempts) = (0usize, 0usize, 0usize);
    while glued < 30 || refused < 15 {
        attempts += 1;
        if attempts > 5000 {
            return Err(format!("only {glued} glued and {refused} refused after {attempts} attempts"));
        }
        let t = r.gen_range(1..=2);
        let n = r.gen_range(1..=3);
        let omega = random_filtered(&mut r, n, t);
        let extra = random_filtered(&mut r, 2, t);
        let gamma = FilteredSpace::product(&omega, &extra).unwrap();
        let phi = projection(&gamma, &omega, extra.space.len());
        let nx = r.gen_range(1..=2);
        let arena = arenas.choose(&mut r).unwrap();
        let s = random_system(&mut r, MonadTag::Dist, nx, arena);

        if glued < 30 {
            let Ok(bs) = enumerate_stoch_behaviors(&s, &omega.space, &omega.filt, h(t), &cfg) else { continue };
            if let Some(b) = bs.choose(&mut r) {
                let back = glue_behavior(&phi, &s, &pullback_behavior(&phi, b)).map_err(|e| e.to_string())?;
                ensure(agree_on_positive(&omega.space, &back, b), || "glued behavior differs from the original".into())?;
                glued += 1;
            }
        }
        if refused < 15 {
            let Ok(bs) = enumerate_stoch_behaviors(&s, &gamma.space, &gamma.filt, h(t), &cfg) else { continue };
            let dependent: Vec<&StochBehavior> = bs.iter().filter(|b| !invariant(&phi, b)).collect();
            if let Some(b) = dependent.choose(&mut r) {
                match glue_behavior(&phi, &s, b) {
                    Err(Error::NotInvariant { left, right, .. }) => {
                        ensure(phi.apply(left) == phi.apply(right), || "witness pair is not in one fiber".into())?;
                        refused += 1;
                    }
                    other => return Err(format!("non-invariant behavior was not refused: {other:?}")),
                }
            }
        }
    }
    Ok(format!("{glued} behaviors glued back, {refused} non-invariant behaviors refused with a witness"))
}

fn criterion_9() -> Outcome {
    for k in 1..=3 {
        let omega = named(k);
        for t in 1..=3 {
            let g = build_graph_clock(&Graph::one_loop(), &omega, h(t)).unwrap();
            let l = build_nondet_linear_clock(&omega, h(t)).unwrap();
            let perm = one_loop_relabeling(&g, &l).map_err(|e| e.to_string())?;
            ensure(g.system.equal_under(&l.system, &perm, &perm, &[0]), || format!("|Ω| = {k}, T = {t}"))?;
        }
    }
    Ok("|Ω| ≤ 3, T ≤ 3".into())
}

fn random_clock(r: &mut ChaCha8Rng, tag: MonadTag) -> ClockSystem {
    let t = r.gen_range(1..=2);
    match tag {
        MonadTag::Identity => build_deterministic_clock(h(r.gen_range(1..=3))),
        MonadTag::Dist => {
            let n = r.gen_range(1..=3);
            let allow_null = r.gen_bool(0.3);
            let space = random_space(r, n, 4, allow_null);
            build_stochastic_clock(&space, &random_filtration(r, n, t), h(t)).unwrap()
        }
        MonadTag::Power => build_nondet_linear_clock(&named(r.gen_range(1..=2)), h(t)).unwrap(),
    }
}

fn criterion_10() -> Outcome {
    let cfg = EnumConfig::with_budget(1 << 18);
    let arenas = small_arenas(2, 2);
    let mut r = rng(10);
    let mut per_tag = Vec::new();
    for tag in [MonadTag::Identity, MonadTag::Dist, MonadTag::Power] {
        let (mut pairs, mut attempts) = (0usize, 0usize);
        while pairs < 40 {
            attempts += 1;
            if attempts > 5000 {
                return Err(format!("{tag}: only {pairs} pairs after {attempts} attempts"));
            }
            let clock = random_clock(&mut r, tag);
            let nx = r.gen_range(1..=2);
            let arena = arenas.choose(&mut r).unwrap();
            let s1 = Arc::new(random_system(&mut r, tag, nx, arena));
            let s2 = if r.gen_bool(0.2) {
                s1.clone()
            } else {
                let nx = r.gen_range(1..=2);
                let arena = arenas.choose(&mut r).unwrap();
                Arc::new(random_system(&mut r, tag, nx, arena))
            };
            let Ok(ms) = enumerate_system_morphisms(&s1, &s2, &cfg) else { continue };
            let Ok(bs) = oracle_behaviors(&clock, &s1, &cfg) else { continue };
            let (Some(m), Some(b)) = (ms.choose(&mut r), bs.choose(&mut r)) else { continue };
            let pushed = pushforward_behavior(&clock, m, b).map_err(|e| e.to_string())?;
            let ok = check_behavior(&clock, &s2, &pushed).map_err(|e| e.to_string())?;
            ensure(ok, || format!("{tag}: pushforward is not a behavior of the target"))?;
            pairs += 1;
        }
        per_tag.push(format!("{tag} {pairs}"));
    }
    Ok(format!("pairs per monad: {}", per_tag.join(", ")))
}

fn criterion_11() -> Outcome {
    use std::process::Command;
    for case in common::CASES {
        let first = common::run_case(case, &[]).to_json();
        let second = common::run_case(case, &[]).to_json();
        ensure(first == second, || format!("{}: reports differ between runs", case.name))?;
        let golden = std::fs::read_to_string(common::expected_report(case)).map_err(|e| format!("{}: {e}", case.name))?;
        ensure(first == golden, || format!("{}: report differs from the golden file", case.name))?;
        let out = Command::new(env!("CARGO_BIN_EXE_clocksys"))
            .args(common::argv(case))
            .output()
            .map_err(|e| e.to_string())?;
        ensure(out.status.code() == Some(case.exit), || {
            format!("{}: exit {:?}, expected {}", case.name, out.status.code(), case.exit)
        })?;
        ensure(String::from_utf8_lossy(&out.stdout) == first, || format!("{}: binary output differs", case.name))?;
    }
    Ok(format!("{} golden cases", common::CASES.len()))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 11] = [
        ("deterministic representability", criterion_1),
        ("stochastic representability", criterion_2),
        ("one-point stochastic clock is the counter", criterion_3),
        ("pushforward of conditional laws", criterion_4),
        ("immersion criteria agree", criterion_5),
        ("pullback projections are immersions", criterion_6),
        ("independent squares are stable", criterion_7),
        ("gluing", criterion_8),
        ("one-loop graph clock is the linear clock", criterion_9),
        ("behavior pushforward", criterion_10),
        ("CLI golden reports", criterion_11),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let id = format!("criterion {:>2}", i + 1);
        if !filter.is_empty() && !filter.iter().any(|f| name.contains(f.as_str()) || id.contains(f.as_str())) {
            continue;
        }
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|p| {
            Err(p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_else(|| "panic".into()))
        });
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("{id} PASS  {name}: {detail} ({secs:.1}s)"),
            Err(why) => {
                failed += 1;
                println!("{id} FAIL  {name}: {why} ({secs:.1}s)");
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
