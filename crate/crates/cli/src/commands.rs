//! One function per subcommand. Each returns a deterministic report.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use assigncoh::assignops::{assignment_basis, extend_minimal, AssignError, MinimalAssignment};
use assigncoh::builders::{
    build_from_description, build_linear_rep, build_polytope, build_product, build_sphere_product, presets, BuildError,
    Built, WeightMatrix,
};
use assigncoh::cochain::{
    cohomology, differential_matrix, euler_characteristic, les_pair_check, relative_cohomology, resolve_strata,
    CochainError, CohomologyResult,
};
use assigncoh::coeffsys::{check_functor, CoefficientSystem, FunctorViolation};
use assigncoh::description::{describe, SpaceDescription};
use assigncoh::momentpoly::{check_moment_condition, decompose, parse_poly, render_one_form, PolyError};
use assigncoh::ratlin::parse_rational;
use assigncoh::stratposet::StratSpace;
use serde_json::{json, Value};

use crate::report::*;
use crate::{BuildArgs, BuildKind, Command, Complex, PolytopeArgs};

pub fn run(cmd: &Command, echo: &str, digest_out: &mut String) -> Result<Report, CliError> {
    let mut ctx = Ctx { echo: echo.to_string(), digest: String::new() };
    let out = match cmd {
        Command::Assignments { file } => assignments(&mut ctx, file),
        Command::Cohomology { file, degree, complex, relative } => {
            cohomology_cmd(&mut ctx, file, *degree, *complex, relative.as_deref())
        }
        Command::Build(args) => build(&mut ctx, args),
        Command::Check { file, les, euler, complex, max_degree } => {
            check(&mut ctx, file, les.as_deref(), *euler, *complex, *max_degree)
        }
        Command::Extend { file, values } => extend(&mut ctx, file, values),
        Command::Decompose { weights, psi } => decompose_cmd(&mut ctx, weights, psi),
    };
    *digest_out = ctx.digest;
    out
}

struct Ctx {
    echo: String,
    digest: String,
}

impl Ctx {
    fn report(&self, results: Value, text: Vec<String>, exit_code: i32) -> Report {
        Report { command: self.echo.clone(), input_digest: self.digest.clone(), results, text, exit_code }
    }
}

fn read(path: &Path) -> Result<Vec<u8>, CliError> {
    std::fs::read(path).map_err(|e| CliError::schema(format!("cannot read {}: {e}", path.display())))
}

fn parse_description(bytes: &[u8], path: &Path) -> Result<SpaceDescription, CliError> {
    let text = std::str::from_utf8(bytes).map_err(|_| CliError::schema(format!("{} is not UTF-8", path.display())))?;
    SpaceDescription::from_json(text).map_err(|e| CliError::schema(format!("{}: {e}", path.display())))
}

fn build_error(e: BuildError) -> CliError {
    CliError::validation(e.to_string())
}

fn load(ctx: &mut Ctx, path: &Path, extra: &[&[u8]]) -> Result<Built, CliError> {
    let bytes = read(path)?;
    let mut parts: Vec<&[u8]> = vec![&bytes];
    parts.extend_from_slice(extra);
    ctx.digest = digest(&parts);
    let doc = parse_description(&bytes, path)?;
    build_from_description(&doc).map_err(build_error)
}

/// `fixed-points`, `minimal`, or a comma-separated list of stratum ids.
fn stratum_set(sp: &StratSpace, text: &str) -> Result<BTreeSet<usize>, CliError> {
    match text.trim() {
        "fixed-points" => Ok(sp.fixed_strata().into_iter().collect()),
        "minimal" => Ok(sp.minimal_strata().into_iter().collect()),
        "" => Ok(BTreeSet::new()),
        list => {
            let ids: Vec<&str> = list.split(',').map(str::trim).collect();
            resolve_strata(sp, &ids).map_err(cochain_error)
        }
    }
}

fn cochain_error(e: CochainError) -> CliError {
    match e {
        CochainError::NotUnionOfStrata(id) => {
            CliError::new(EXIT_NOT_UNION_OF_STRATA, "not_union_of_strata", format!("{id:?} is not a stratum, so the set is not a union of strata"))
                .with_details(json!({ "id": id }))
        }
        other => CliError::validation(other.to_string()),
    }
}

fn id_list(sp: &StratSpace, set: &BTreeSet<usize>) -> Vec<String> {
    set.iter().map(|&i| sp.id(i).to_string()).collect()
}

fn assignments(ctx: &mut Ctx, file: &Path) -> Result<Report, CliError> {
    let (sp, v) = load(ctx, file, &[])?;
    let basis = assignment_basis(&v);
    let mut text = vec![format!("dim A = {}", basis.len())];
    let mut json_basis = Vec::new();
    for (i, a) in basis.iter().enumerate() {
        let entries: Vec<String> =
            sp.strata().iter().map(|s| format!("{} = {}", s.id, rat_text(&a.values[&s.id]))).collect();
        text.push(format!("basis {}: {}", i + 1, entries.join(", ")));
        let obj: BTreeMap<&str, Vec<String>> = a.values.iter().map(|(k, x)| (k.as_str(), rat_strings(x))).collect();
        json_basis.push(obj);
    }
    Ok(ctx.report(json!({ "dim": basis.len(), "basis": json_basis }), text, EXIT_OK))
}

fn complex_name(strict: bool) -> &'static str {
    if strict {
        "reduced"
    } else {
        "full"
    }
}

fn stricts(c: Complex) -> Vec<bool> {
    match c {
        Complex::Reduced => vec![true],
        Complex::Full => vec![false],
        Complex::Both => vec![true, false],
    }
}

fn chain_label(sp: &StratSpace, t: &[usize]) -> String {
    format!("({})", sp.ids_of(t).join(", "))
}

fn describe_result(sp: &StratSpace, r: &CohomologyResult, group: &str) -> (Value, Vec<String>) {
    let mut text = vec![format!("dim {group} = {} ({} complex)", r.dim, complex_name(r.strict))];
    let d = &r.diagnostics;
    text.push(format!("  cochains {}, rank in {}, rank out {}", d.cochain_dim, d.rank_in, d.rank_out));
    let mut reps = Vec::new();
    for (i, c) in r.cocycle_representatives.iter().enumerate() {
        let mut entries = Vec::new();
        let mut parts = Vec::new();
        for (j, t) in c.basis.tuples().iter().enumerate() {
            let val = &c.coords[c.basis.range(j)];
            if val.iter().all(|x| *x == Default::default()) {
                continue;
            }
            parts.push(format!("{} = {}", chain_label(sp, t), rat_text(val)));
            entries.push(json!({ "chain": sp.ids_of(t), "value": rat_strings(val) }));
        }
        text.push(format!("  representative {}: {}", i + 1, parts.join(", ")));
        reps.push(entries);
    }
    let mut obj = json!({
        "dim": r.dim,
        "complex": complex_name(r.strict),
        "cochain_dim": d.cochain_dim,
        "rank_in": d.rank_in,
        "rank_out": d.rank_out,
        "representatives": reps,
    });
    if let Some(c) = d.coefficient_system_dim {
        text.push(format!("  restricted-coefficient check: dim {c}"));
        obj["coefficient_system_dim"] = json!(c);
    }
    (obj, text)
}

fn cohomology_cmd(
    ctx: &mut Ctx,
    file: &Path,
    k: usize,
    complex: Complex,
    relative: Option<&str>,
) -> Result<Report, CliError> {
    let (sp, v) = load(ctx, file, &[])?;
    let n = relative.map(|s| stratum_set(&sp, s)).transpose()?;
    let group = if n.is_some() { format!("HA^{k}(M,N)") } else { format!("HA^{k}") };
    let mut text = Vec::new();
    let mut results = json!({ "degree": k });
    if let Some(n) = &n {
        text.push(format!("N = {{{}}}", id_list(&sp, n).join(", ")));
        results["relative"] = json!(id_list(&sp, n));
    }
    let mut dims = Vec::new();
    for strict in stricts(complex) {
        let r = match &n {
            Some(n) => relative_cohomology(&v, n, k, strict).map_err(cochain_error)?,
            None => cohomology(&v, k, strict),
        };
        let (obj, lines) = describe_result(&sp, &r, &group);
        text.extend(lines);
        results[complex_name(strict)] = obj;
        dims.push(r.dim);
    }
    if dims.len() == 2 {
        let agree = dims[0] == dims[1];
        text.push(format!("full and reduced complexes {}", if agree { "agree" } else { "DISAGREE" }));
        results["agree"] = json!(agree);
    }
    Ok(ctx.report(results, text, EXIT_OK))
}

fn parse_rows(s: &str, what: &str) -> Result<Vec<Vec<i64>>, CliError> {
    s.split(';')
        .map(|row| {
            row.split(',')
                .map(|x| x.trim().parse::<i64>().map_err(|_| CliError::schema(format!("{what}: {x:?} is not an integer"))))
                .collect()
        })
        .collect()
}

fn weight_matrix(s: &str) -> Result<WeightMatrix, CliError> {
    let rows = parse_rows(s, "weights")?;
    let n = rows.first().map_or(0, Vec::len);
    WeightMatrix::new(n, rows).map_err(|e| CliError::schema(format!("weights: {e}")))
}

fn polytope_input(p: &PolytopeArgs) -> Result<assigncoh::builders::PolytopeData, CliError> {
    Ok(if p.segment {
        presets::segment_data()
    } else if p.triangle {
        presets::polygon_data(presets::TRIANGLE)
    } else if p.square {
        presets::polygon_data(presets::SQUARE)
    } else if p.pentagon {
        presets::polygon_data(presets::PENTAGON)
    } else if p.hexagon {
        presets::polygon_data(presets::HEXAGON)
    } else if p.cube {
        presets::cube_data()
    } else {
        let rows = parse_rows(p.normals.as_deref().unwrap_or_default(), "normals")?;
        let normals: Vec<[i64; 2]> = rows
            .iter()
            .map(|r| <[i64; 2]>::try_from(r.as_slice()).map_err(|_| CliError::schema(format!("normal {r:?} is not a plane vector"))))
            .collect::<Result<_, _>>()?;
        presets::polygon_data(&normals)
    })
}

fn build(ctx: &mut Ctx, args: &BuildArgs) -> Result<Report, CliError> {
    ctx.digest = digest(&[ctx.echo.as_bytes()]);
    let mut text = Vec::new();
    let mut results = json!({});
    let (sp, _) = match &args.kind {
        BuildKind::LinearRep { weights } => build_linear_rep(&weight_matrix(weights)?).map_err(build_error)?,
        BuildKind::SphereProduct { n, lambdas } => {
            let rows = parse_rows(lambdas, "lambdas")?;
            let cells = 3usize.checked_pow(rows.len() as u32).unwrap_or(usize::MAX);
            let built = build_sphere_product(*n, &rows).map_err(build_error)?;
            text.push(format!("input cells: {cells}"));
            results["input_cells"] = json!(cells);
            built
        }
        BuildKind::Polytope(p) => build_polytope(&polytope_input(p)?).map_err(build_error)?,
        BuildKind::Product { left, right } => {
            let (lb, rb) = (read(left)?, read(right)?);
            ctx.digest = digest(&[ctx.echo.as_bytes(), &lb, &rb]);
            let (l, _) = build_from_description(&parse_description(&lb, left)?).map_err(build_error)?;
            let (r, _) = build_from_description(&parse_description(&rb, right)?).map_err(build_error)?;
            build_product(&l, &r).map_err(build_error)?
        }
    };
    let inv = sp.invariants();
    text.push(format!("strata: {}", sp.len()));
    text.push(format!("covers: {}", sp.covers().len()));
    for (dim, count) in inv.strata_by_dim.iter().rev() {
        text.push(format!("strata with stabilizer dimension {dim}: {count}"));
    }
    results["strata"] = json!(sp.len());
    results["covers"] = json!(sp.covers().len());
    results["strata_by_stabilizer_dim"] =
        json!(inv.strata_by_dim.iter().map(|(d, c)| (d.to_string(), *c)).collect::<BTreeMap<_, _>>());
    let desc = describe(&sp, None);
    match &args.out {
        Some(path) => {
            std::fs::write(path, desc.to_json() + "\n")
                .map_err(|e| CliError::schema(format!("cannot write {}: {e}", path.display())))?;
            text.push(format!("wrote {}", path.display()));
            results["out"] = json!(path.display().to_string());
        }
        None => {
            results["description"] = serde_json::to_value(&desc).expect("plain data serializes");
        }
    }
    Ok(ctx.report(results, text, EXIT_OK))
}

fn violation_text(v: &FunctorViolation) -> String {
    match v {
        FunctorViolation::NotIdentity { x } => format!("proj({x}, {x}) is not the identity"),
        FunctorViolation::NotComposable { x, y, z } => {
            format!("proj({y}, {z}) proj({x}, {y}) differs from proj({x}, {z})")
        }
    }
}

fn d_squared_vanishes(v: &CoefficientSystem, strict: bool) -> Option<usize> {
    let top = v.space().height().max(1);
    (0..top).find(|&k| !differential_matrix(v, k + 1, strict).mul(&differential_matrix(v, k, strict)).expect("shapes chain").is_zero())
}

fn check(
    ctx: &mut Ctx,
    file: &Path,
    les: Option<&str>,
    euler: bool,
    complex: Complex,
    max_degree: Option<usize>,
) -> Result<Report, CliError> {
    let (sp, v) = load(ctx, file, &[])?;
    let mut ok = true;
    let mut text = Vec::new();
    let mut results = json!({});

    let functor = check_functor(&v);
    ok &= functor.passes();
    let violations: Vec<String> = functor.violations.iter().map(violation_text).collect();
    text.push(format!("functor laws: {}", if functor.passes() { "pass" } else { "FAIL" }));
    text.extend(violations.iter().map(|s| format!("  {s}")));
    results["functor_laws"] = json!({ "pass": functor.passes(), "violations": violations });

    let mut d2 = serde_json::Map::new();
    for strict in stricts(complex) {
        let bad = d_squared_vanishes(&v, strict);
        ok &= bad.is_none();
        match bad {
            None => text.push(format!("d^2 = 0 ({} complex): pass", complex_name(strict))),
            Some(k) => text.push(format!("d^2 = 0 ({} complex): FAIL in degree {k}", complex_name(strict))),
        }
        d2.insert(complex_name(strict).into(), json!({ "pass": bad.is_none(), "failing_degree": bad }));
    }
    results["d_squared"] = Value::Object(d2);

    if let Some(set_text) = les {
        let n = stratum_set(&sp, set_text)?;
        text.push(format!("N = {{{}}}", id_list(&sp, &n).join(", ")));
        let mut tables = serde_json::Map::new();
        for strict in stricts(complex) {
            let report = les_pair_check(&v, &n, strict, max_degree).map_err(cochain_error)?;
            ok &= report.exact();
            text.push(format!(
                "long exact sequence ({} complex): {}",
                complex_name(strict),
                if report.exact() { "exact" } else { "NOT EXACT" }
            ));
            let dims: Vec<String> = report.dims().iter().map(usize::to_string).collect();
            text.push(format!("  dims: {}", dims.join(", ")));
            let mut rows = Vec::new();
            for node in &report.nodes {
                let base = node.label.strip_suffix(&format!("^{}", node.degree)).unwrap_or(&node.label);
                let label = base.replacen("HA", &format!("HA^{}", node.degree), 1);
                text.push(format!(
                    "  {label:<12} dim {:>3}  rank in {:>3}  rank out {:>3}  {}",
                    node.dim,
                    node.rank_in,
                    node.rank_out,
                    if node.exact { "exact" } else { "NOT EXACT" }
                ));
                rows.push(json!({
                    "node": label,
                    "dim": node.dim,
                    "rank_in": node.rank_in,
                    "rank_out": node.rank_out,
                    "exact": node.exact,
                }));
            }
            tables.insert(complex_name(strict).into(), json!({ "exact": report.exact(), "dims": report.dims(), "nodes": rows }));
        }
        results["relative"] = json!(id_list(&sp, &n));
        results["les"] = Value::Object(tables);
    }
    if euler {
        let chi = euler_characteristic(&v);
        text.push(format!("euler characteristic: {chi}"));
        results["euler_characteristic"] = json!(chi);
    }
    text.push(format!("verdict: {}", if ok { "pass" } else { "FAIL" }));
    results["pass"] = json!(ok);
    Ok(ctx.report(results, text, if ok { EXIT_OK } else { EXIT_VALIDATION }))
}

fn extend(ctx: &mut Ctx, file: &Path, values: &Path) -> Result<Report, CliError> {
    let vb = read(values)?;
    let (sp, v) = load(ctx, file, &[&vb])?;
    let raw: BTreeMap<String, Vec<String>> =
        serde_json::from_slice(&vb).map_err(|e| CliError::schema(format!("{}: {e}", values.display())))?;
    let mut parsed = BTreeMap::new();
    for (id, xs) in raw {
        let vec = xs
            .iter()
            .map(|s| parse_rational(s))
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| CliError::schema(format!("value for {id:?}: {e}")))?;
        parsed.insert(id, vec);
    }
    let a = extend_minimal(&v, &MinimalAssignment { values: parsed }).map_err(|e| match e {
        AssignError::IncompatibleMinimalValues { ref x1, ref x2, ref y } => {
            CliError::new(EXIT_INCOMPATIBLE, "incompatible_minimal_values", e.to_string())
                .with_details(json!({ "x1": x1, "x2": x2, "y": y }))
        }
        other => CliError::validation(other.to_string()),
    })?;
    let mut text = vec!["assignment:".to_string()];
    let mut obj = BTreeMap::new();
    for s in sp.strata() {
        text.push(format!("  {} = {}", s.id, rat_text(&a.values[&s.id])));
        obj.insert(s.id.clone(), rat_strings(&a.values[&s.id]));
    }
    Ok(ctx.report(json!({ "assignment": obj }), text, EXIT_OK))
}

fn poly_error(e: PolyError) -> CliError {
    CliError::schema(format!("psi: {e}"))
}

fn decompose_cmd(ctx: &mut Ctx, weights: &str, psi: &str) -> Result<Report, CliError> {
    ctx.digest = digest(&[weights.as_bytes(), psi.as_bytes()]);
    let w = weight_matrix(weights)?;
    let p = parse_poly(psi, &w).map_err(poly_error)?;
    let failing = match check_moment_condition(&p) {
        Ok(r) => r.failing,
        Err(PolyError::NonzeroConstantTerm) => vec!["1".to_string()],
        Err(e) => return Err(poly_error(e)),
    };
    let mut results = json!({ "psi": p.to_text() });
    if !failing.is_empty() {
        let text = vec![format!("moment condition: fails at {}", failing.join(", "))];
        results["condition"] = json!({ "holds": false, "failing": failing });
        return Ok(ctx.report(results, text, EXIT_CONDITION_FAILED));
    }
    let fc = decompose(&p).map_err(poly_error)?;
    let mut text = vec!["moment condition: holds".to_string()];
    let (mut f, mut g) = (Vec::new(), Vec::new());
    for j in 0..w.d() {
        text.push(format!("f{} = {}", j + 1, fc.f[j].to_text()));
        f.push(fc.f[j].to_text());
    }
    for j in 0..w.d() {
        text.push(format!("g{} = {}", j + 1, fc.g[j].to_text()));
        g.push(fc.g[j].to_text());
    }
    let form = render_one_form(&fc);
    text.push(form.clone());
    results["condition"] = json!({ "holds": true, "failing": [] });
    results["f"] = json!(f);
    results["g"] = json!(g);
    results["one_form"] = json!(form);
    Ok(ctx.report(results, text, EXIT_OK))
}
