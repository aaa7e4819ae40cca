//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
//! exits nonzero if any fails.

use std::collections::BTreeMap;
use std::process::ExitCode;
use std::time::Instant;

use pmod_core::constructions::{
    build_s, build_s_dprime, build_s_prime, candy_wrap, concat, gen4, min3, min3_plan, min3_rect, string_candies,
    BuildResult, CandyModule,
};
use pmod_core::rect::{barcode_1d, barcode_of, canonical_hom_dim};
use pmod_core::sample::{self, module_with_dims, random_module_bounded, random_rects};
use pmod_core::verify::{
    check_candy, decompose_two_rows, end_algebra, end_dim, find_separator, has_nontrivial_idempotent,
    iso_certificate, try_split, Status,
};
use pmod_core::{AxisEmbedding, AxisMap, Field, GridBox, Matrix, PersModule, RectDecomp, Rectangle};
use rand::Rng;

const Q: Field = Field::Rationals;
const F2: Field = Field::Prime(2);

type Check = Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok { Ok(()) } else { Err(msg()) }
}

fn e<T, E: std::fmt::Display>(r: Result<T, E>, ctx: &str) -> Result<T, String> {
    r.map_err(|err| format!("{ctx}: {err}"))
}

/// Restriction along the returned line equals the input up to isomorphism.
fn recovers(b: &BuildResult, v: &PersModule, ctx: &str) -> Result<(), String> {
    let r = e(b.restriction(), ctx)?;
    if v.n() == 1 {
        let (x, y) = (e(barcode_1d(&r), ctx)?, e(barcode_1d(v), ctx)?);
        ensure(x == y, || format!("{ctx}: restriction barcode {x:?} vs {y:?}"))
    } else {
        let iso = e(iso_certificate(&r, v, 0, 20), ctx)?;
        ensure(iso.is_some(), || format!("{ctx}: no isomorphism to the input"))
    }
}

fn valid(m: &PersModule, ctx: &str) -> Result<(), String> {
    e(m.check(), ctx)
}

fn local_dim(m: &PersModule, ctx: &str) -> Result<usize, String> {
    e(e(end_algebra(m), ctx)?.local_dim(), ctx)
}

fn s_suite() -> Check {
    let mut r = sample::rng(1);
    for seed in 0..50 {
        let count = r.gen_range(1..=5);
        let v = random_rects(Q, 1, count, 6, &mut r);
        let ctx = format!("seed {seed}");
        let b = e(build_s(&v), &ctx)?;
        valid(&b.module, &ctx)?;
        ensure(b.layer_count == 4, || format!("{ctx}: {} layers", b.layer_count))?;
        let ed = e(end_dim(&b.module), &ctx)?;
        ensure(ed == 1, || format!("{ctx}: end_dim {ed}"))?;
        let bars = e(barcode_1d(&e(b.restriction(), &ctx)?), &ctx)?;
        ensure(bars == e(barcode_of(&v), &ctx)?, || format!("{ctx}: barcode {bars:?}"))?;
    }
    Ok("50 rectangle modules".into())
}

fn cover_suite() -> Check {
    let mut r = sample::rng(2);
    for seed in 0..30 {
        let extents: Vec<usize> =
            if seed % 2 == 0 { vec![r.gen_range(1..=5)] } else { vec![r.gen_range(1..=5), r.gen_range(1..=5)] };
        let v = random_module_bounded(Q, &extents, 2, 10, &mut r);
        for (name, build) in [("S'", build_s_prime as fn(&PersModule) -> _), ("S''", build_s_dprime)] {
            let ctx = format!("seed {seed} {name} on {extents:?}");
            let b = e(build(&v), &ctx)?;
            valid(&b.module, &ctx)?;
            ensure(b.layer_count == 5, || format!("{ctx}: {} layers", b.layer_count))?;
            let ed = e(end_dim(&b.module), &ctx)?;
            ensure(ed == 1, || format!("{ctx}: end_dim {ed}"))?;
            recovers(&b, &v, &ctx)?;
        }
    }
    Ok("30 modules, both constructions".into())
}

fn candy_suite() -> Check {
    let mut r = sample::rng(3);
    let mut groups: Vec<Vec<PersModule>> = vec![Vec::new(), Vec::new()];
    for i in 0..6 {
        let extents: Vec<usize> = if i < 3 { vec![r.gen_range(1..=4)] } else { vec![r.gen_range(1..=3), r.gen_range(1..=3)] };
        groups[i / 3].push(random_module_bounded(Q, &extents, 2, 5, &mut r));
    }
    let mut concats = 0;
    for (g, mods) in groups.iter().enumerate() {
        let mut candies = Vec::new();
        for (i, v) in mods.iter().enumerate() {
            let ctx = format!("group {g} module {i}");
            let b = e(candy_wrap(v), &ctx)?;
            valid(&b.module, &ctx)?;
            ensure(b.layer_count == 9, || format!("{ctx}: {} layers", b.layer_count))?;
            recovers(&b, v, &ctx)?;
            let c = e(CandyModule::new(b.module), &ctx)?;
            let rep = e(check_candy(&c), &ctx)?;
            ensure(rep.passed && rep.end_dim == 1, || format!("{ctx}: {rep:?}"))?;
            candies.push(c);
        }
        for (i, a) in candies.iter().enumerate() {
            for (j, b) in candies.iter().enumerate() {
                let ctx = format!("group {g} concat {i}∘{j}");
                let c = e(concat(a, b), &ctx)?;
                valid(&c.module, &ctx)?;
                ensure(c.ul == a.ul, || format!("{ctx}: upper left corner moved"))?;
                let rep = e(check_candy(&c), &ctx)?;
                ensure(rep.passed, || format!("{ctx}: {rep:?}"))?;
                concats += 1;
            }
        }
        let ctx = format!("group {g} string");
        let s = e(string_candies(mods), &ctx)?;
        valid(&s.candy.module, &ctx)?;
        for (k, ((line, dom), v)) in s.embeddings.iter().zip(mods).enumerate() {
            let back = e(s.candy.module.restrict(line, dom), &ctx)?;
            let iso = e(iso_certificate(&back, v, 0, 20), &ctx)?;
            ensure(iso.is_some(), || format!("{ctx}: input {k} not recovered"))?;
        }
        let rep = e(check_candy(&s.candy), &ctx)?;
        ensure(rep.passed, || format!("{ctx}: {rep:?}"))?;
    }
    Ok(format!("6 candies, {concats} concatenations, 2 strings of 3"))
}

/// All multisets of intervals in `[0, 3]` with total dimension at most 6.
fn interval_multisets() -> Vec<Vec<(i64, i64)>> {
    let ivs: Vec<(i64, i64)> = (0..=3).flat_map(|b| (b..=3).map(move |d| (b, d))).collect();
    let mut out = Vec::new();
    fn go(ivs: &[(i64, i64)], from: usize, budget: i64, cur: &mut Vec<(i64, i64)>, out: &mut Vec<Vec<(i64, i64)>>) {
        if !cur.is_empty() {
            out.push(cur.clone());
        }
        for i in from..ivs.len() {
            let w = ivs[i].1 - ivs[i].0 + 1;
            if w <= budget {
                cur.push(ivs[i]);
                go(ivs, i, budget - w, cur, out);
                cur.pop();
            }
        }
    }
    go(&ivs, 0, 6, &mut Vec::new(), &mut out);
    out
}

fn min3_suite() -> Check {
    let all = interval_multisets();
    let bx = GridBox::new(vec![0], vec![3]).unwrap();
    for ms in &all {
        let ctx = format!("{ms:?}");
        let rects = ms.iter().map(|&(b, d)| Rectangle::interval(b, d).unwrap()).collect();
        let v = e(RectDecomp::new(Q, bx.clone(), rects), &ctx)?;
        let b = e(min3(&v), &ctx)?;
        valid(&b.module, &ctx)?;
        ensure(b.layer_count == 3, || format!("{ctx}: {} layers", b.layer_count))?;
        let ld = local_dim(&b.module, &ctx)?;
        ensure(ld == 1, || format!("{ctx}: local_dim {ld}"))?;
        let bars = e(barcode_1d(&e(b.restriction(), &ctx)?), &ctx)?;
        ensure(bars == e(barcode_of(&v), &ctx)?, || format!("{ctx}: barcode {bars:?}"))?;
    }
    Ok(format!("{} interval multisets", all.len()))
}

/// Random strictly increasing `[0, 4] -> [0, m)`.
fn random_table(m: i64, r: &mut impl Rng) -> Vec<i64> {
    loop {
        let mut xs: Vec<i64> = (0..5).map(|_| r.gen_range(0..m)).collect();
        xs.sort();
        xs.dedup();
        if xs.len() == 5 {
            return xs;
        }
    }
}

fn two_layer_suite() -> Check {
    let target: BTreeMap<(i64, i64), usize> = [((0, 1), 1), ((3, 4), 1)].into_iter().collect();
    let mut r = sample::rng(5);
    let (mut found, mut drawn, mut by_rows) = (0, 0u64, 0);
    while found < 200 {
        drawn += 1;
        let m = r.gen_range(5..=7i64);
        let values = random_table(m, &mut r);
        let row = r.gen_range(0..=1i64);
        let bx = GridBox::new(vec![0, 0], vec![m - 1, 1]).unwrap();
        // proposal: the line's dims already match the target, everything else is free
        let dims = bx
            .vertices()
            .map(|v| match values.iter().position(|&x| x == v[0]) {
                Some(t) if v[1] == row => usize::from(t != 2),
                _ => r.gen_range(0..=2),
            })
            .collect();
        let module = module_with_dims(F2, bx.clone(), dims, &mut r);
        let line = AxisEmbedding::new(vec![AxisMap::Table { start: 0, values }], 1, row).unwrap();
        let dom = GridBox::new(vec![0], vec![4]).unwrap();
        let rest = e(module.restrict(&line, &dom), "restrict")?;
        if e(barcode_1d(&rest), "barcode")? != target {
            continue;
        }
        found += 1;
        let ctx = format!("sample {found}");
        let v = e(try_split(&module, drawn, 64), &ctx)?;
        if v.status == Status::DecomposableCertified {
            continue;
        }
        let y = find_separator(&module).ok_or_else(|| format!("{ctx}: {:?} and no separator", v.status))?;
        let s = e(decompose_two_rows(&module, &y), &ctx)?;
        ensure(s.nonzero_parts() >= 2, || format!("{ctx}: trivial splitting"))?;
        by_rows += 1;
    }
    Ok(format!("200 of {drawn} draws certified decomposable ({by_rows} by row splitting)"))
}

fn gap_suite() -> Check {
    let mut r = sample::rng(6);
    for seed in 0..500 {
        let ctx = format!("seed {seed}");
        let m = r.gen_range(2..=6i64);
        let bx = GridBox::new(vec![0, 0], vec![m - 1, 1]).unwrap();
        let mut dims: Vec<usize> = (0..bx.len()).map(|_| r.gen_range(0..=2)).collect();
        // monotone path x < y < z with y forced to zero
        let (x, y, z) = loop {
            let pick = |r: &mut sample::SampleRng| vec![r.gen_range(0..m), r.gen_range(0..=1)];
            let (a, b, c) = (pick(&mut r), pick(&mut r), pick(&mut r));
            let le = |p: &[i64], q: &[i64]| p[0] <= q[0] && p[1] <= q[1];
            if le(&a, &b) && le(&b, &c) && a != b && b != c {
                break (a, b, c);
            }
        };
        dims[bx.index(&y).unwrap()] = 0;
        for p in [&x, &z] {
            let i = bx.index(p).unwrap();
            dims[i] = dims[i].max(1);
        }
        let module = module_with_dims(F2, bx.clone(), dims, &mut r);
        let s = e(decompose_two_rows(&module, &y), &ctx)?;
        ensure(s.nonzero_parts() >= 2, || format!("{ctx}: trivial splitting"))?;
        let sum = s.parts[1..].iter().try_fold(s.parts[0].clone(), |acc, p| acc.direct_sum(p));
        let sum = e(sum, &ctx)?;
        ensure(s.iso.source().as_ref() == &module, || format!("{ctx}: iso has the wrong source"))?;
        ensure(s.iso.target().as_ref() == &sum, || format!("{ctx}: iso target is not the sum of the parts"))?;
        e(s.iso.check_natural(), &ctx)?;
        ensure(s.iso.is_iso(), || format!("{ctx}: parts do not recompose"))?;
    }
    Ok("500 gapped modules".into())
}

fn rect_suite() -> Check {
    let mut r = sample::rng(7);
    for seed in 0..30 {
        let count = r.gen_range(1..=4);
        let v = random_rects(Q, 2, count, 4, &mut r);
        let ctx = format!("rect seed {seed}");
        let plan = e(min3_plan(&v), &ctx)?;
        let (sc, rf) = (plan.scaled.summands(), plan.refined.summands());
        let le = |a: &[i64], b: &[i64]| a.iter().zip(b).all(|(x, y)| x <= y);
        for i in 0..rf.len() {
            ensure(le(&sc[i].b, &rf[i].b) && le(&rf[i].b, &sc[i].d) && le(&sc[i].d, &rf[i].d), || {
                format!("{ctx}: b <= b' <= d <= d' fails for summand {i}")
            })?;
        }
        let mut order: Vec<usize> = (0..rf.len()).collect();
        order.sort_by_key(|&i| rf[i].b[0]);
        for w in order.windows(2) {
            let (i, j) = (w[0], w[1]);
            ensure(rf[i].b[0] < rf[j].b[0] && rf[j].d[0] < rf[i].d[0], || format!("{ctx}: first coordinates not strictly nested"))?;
        }
        let last = *order.last().unwrap();
        ensure(le(&rf[last].b, &rf[last].d), || format!("{ctx}: b'_m > d'_m"))?;
        for i in 0..rf.len() {
            for j in 0..rf.len() {
                if i != j {
                    let h = e(canonical_hom_dim(&rf[i], &rf[j]), &ctx)?;
                    ensure(h == 0, || format!("{ctx}: Hom between refined summands {i}, {j}"))?;
                }
            }
        }
        let b = e(min3_rect(&v), &ctx)?;
        valid(&b.module, &ctx)?;
        ensure(b.layer_count == 3, || format!("{ctx}: {} layers", b.layer_count))?;
        let ld = local_dim(&b.module, &ctx)?;
        ensure(ld == 1, || format!("{ctx}: local_dim {ld}"))?;
        recovers(&b, &v.to_module(), &ctx)?;
    }
    for seed in 0..20 {
        let extents = [r.gen_range(1..=3), r.gen_range(1..=3)];
        let v = random_module_bounded(Q, &extents, 2, 6, &mut r);
        let ctx = format!("gen4 seed {seed} on {extents:?}");
        let b = e(gen4(&v), &ctx)?;
        valid(&b.module, &ctx)?;
        ensure(b.layer_count == 4, || format!("{ctx}: {} layers", b.layer_count))?;
        let ld = local_dim(&b.module, &ctx)?;
        ensure(ld == 1, || format!("{ctx}: local_dim {ld}"))?;
        recovers(&b, &v, &ctx)?;
    }
    Ok("30 rectangle modules, 20 general modules".into())
}

/// Every module over F_2 on the box with dims at most one.
fn thin_modules(bx: &GridBox) -> Vec<PersModule> {
    let n = bx.n();
    let mut out = Vec::new();
    for mask in 0u32..(1 << bx.len()) {
        let dims: Vec<usize> = (0..bx.len()).map(|i| ((mask >> i) & 1) as usize).collect();
        let edges: Vec<(usize, usize)> = (0..bx.len())
            .flat_map(|i| (0..n).map(move |k| (i, k)))
            .filter(|&(i, k)| bx.up(i, k).is_some_and(|j| dims[i] == 1 && dims[j] == 1))
            .collect();
        for bits in 0u32..(1 << edges.len()) {
            let given = edges
                .iter()
                .enumerate()
                .map(|(t, &(i, k))| (bx.vertex(i), k, Matrix::from_i64(F2, &[vec![((bits >> t) & 1) as i64]])))
                .collect();
            let m = PersModule::new(F2, bx.clone(), dims.clone(), given).expect("shapes match");
            if m.validate().is_ok() {
                out.push(m);
            }
        }
    }
    out
}

fn oracle_suite() -> Check {
    let mut count = 0;
    let mut zero = 0;
    for w in 1..=3i64 {
        for h in 1..=2i64 {
            let bx = GridBox::new(vec![0, 0], vec![w - 1, h - 1]).unwrap();
            for (i, m) in thin_modules(&bx).into_iter().enumerate() {
                if m.is_zero() {
                    zero += 1;
                    continue;
                }
                let ctx = format!("{w}x{h} module {i}");
                let verdict = e(try_split(&m, i as u64, 64), &ctx)?;
                let alg = e(end_algebra(&m), &ctx)?;
                let split = has_nontrivial_idempotent(&alg).ok_or_else(|| format!("{ctx}: enumeration too large"))?;
                let expected = if split { Status::DecomposableCertified } else { Status::IndecomposableCertified };
                ensure(verdict.status == expected, || format!("{ctx}: {:?} vs oracle {expected:?}", verdict.status))?;
                count += 1;
            }
        }
    }
    Ok(format!("{count} nonzero modules ({zero} zero modules skipped)"))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Check); 8] = [
        ("1 four-layer rectangle construction", s_suite),
        ("2 cover and envelope constructions", cover_suite),
        ("3 candies, concatenation, strings", candy_suite),
        ("4 three-layer 1D construction (exhaustive)", min3_suite),
        ("5 two layers never suffice for I[0,1]+I[3,4]", two_layer_suite),
        ("6 two-row splitting at a zero vertex", gap_suite),
        ("7 three-layer rectangle and four-layer general", rect_suite),
        ("8 verdicts agree with idempotent enumeration", oracle_suite),
    ];
    // candy strings over 2D inputs live on 3D boxes beyond the default cap
    if std::env::var_os("PMOD_MAX_VERTICES").is_none() {
        std::env::set_var("PMOD_MAX_VERTICES", "2000000");
    }
    println!("vertex cap: {}", pmod_core::grid::max_vertices());
    let mut failed = 0;
    for (name, run) in criteria {
        let t = Instant::now();
        let res = run();
        let secs = t.elapsed().as_secs_f64();
        match res {
            Ok(msg) => println!("criterion {name}: PASS ({msg}; {secs:.1}s)"),
            Err(msg) => {
                failed += 1;
                println!("criterion {name}: FAIL ({msg}; {secs:.1}s)");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", 8 - failed);
    if failed == 0 { ExitCode::SUCCESS } else { ExitCode::FAILURE }
}
