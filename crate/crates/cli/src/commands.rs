use std::fmt::Write;

use serde_json::{json, Value};
use smoothable::catalog::{catalog_cached, make};
use smoothable::classify::{components, identify, is_holonomic};
use smoothable::deform::{integrate, ExampleDeformation, ExampleName, IntegrationOptions, Preset, SemiToricRealization};
use smoothable::fo::{codim2_split, fo_q1, fo_sweep, fo_toric, fo_verify, mod_inverse, SweepRow};
use smoothable::format::sci;
use smoothable::io::{parse_biresidue, to_json, to_text};
use smoothable::render::{render_diagram, DiagramFormat};
use smoothable::{BiresidueMatrix, Error, FamilyTag, Result, SmoothingDiagram};

use super::{Cmd, DeformCmd, FoCmd, Format, MatrixSource};

fn pick(format: Option<Format>, allowed: &[Format]) -> Result<Format> {
    let f = format.unwrap_or(allowed[0]);
    if allowed.contains(&f) {
        Ok(f)
    } else {
        let names: Vec<String> = allowed.iter().map(|a| format!("{a:?}").to_lowercase()).collect();
        Err(Error::InvalidParameter(format!(
            "format {} not supported here; use one of {}",
            format!("{f:?}").to_lowercase(),
            names.join(", ")
        )))
    }
}

fn join<T: ToString>(v: &[T], sep: &str) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(sep)
}

fn pretty(v: Value) -> String {
    let mut s = serde_json::to_string_pretty(&v).expect("json value serializes");
    s.push('\n');
    s
}

fn load(src: &MatrixSource) -> Result<BiresidueMatrix> {
    match (&src.tag, &src.file) {
        (Some(t), None) => make(&t.parse::<FamilyTag>()?),
        (None, Some(path)) => {
            let text = if path == "-" {
                std::io::read_to_string(std::io::stdin()).map_err(|e| Error::InvalidParameter(e.to_string()))?
            } else {
                std::fs::read_to_string(path).map_err(|e| Error::InvalidParameter(format!("{path}: {e}")))?
            };
            parse_biresidue(&text)
        }
        _ => Err(Error::InvalidParameter("give exactly one of --tag or --file".into())),
    }
}

pub fn run(cmd: Cmd, format: Option<Format>) -> Result<String> {
    match cmd {
        Cmd::Catalog { tag, n } => catalog(tag, n, format),
        Cmd::Diagram { src } => diagram(&load(&src)?, format),
        Cmd::Classify { src } => classify(&load(&src)?, format),
        Cmd::Rank { src } => rank(&load(&src)?, format),
        Cmd::Holonomic { src } => holonomic(&load(&src)?, format),
        Cmd::Fo { cmd } => fo(cmd, format),
        Cmd::Deform { cmd } => deform(cmd, format),
    }
}

fn catalog(tag: Option<String>, n: Option<usize>, format: Option<Format>) -> Result<String> {
    let f = pick(format, &[Format::Text, Format::Json])?;
    match (tag, n) {
        (Some(t), None) => {
            let b = make(&t.parse()?)?;
            Ok(match f {
                Format::Json => to_json(b.matrix()) + "\n",
                _ => to_text(b.matrix()),
            })
        }
        (None, Some(n)) => {
            let entries = catalog_cached(n)?;
            if f == Format::Json {
                let list: Vec<Value> = entries
                    .iter()
                    .map(|e| {
                        json!({
                            "tag": e.tag.to_string(),
                            "rank": e.matrix.rank(),
                            "also": e.orbit.iter().filter(|t| **t != e.tag).map(|t| t.to_string()).collect::<Vec<_>>(),
                        })
                    })
                    .collect();
                return Ok(pretty(json!({ "n": n, "members": list })));
            }
            let mut out = String::new();
            for e in entries.iter() {
                write!(out, "{} rank={}", e.tag, e.matrix.rank()).unwrap();
                let also: Vec<&FamilyTag> = e.orbit.iter().filter(|t| **t != e.tag).collect();
                if !also.is_empty() {
                    write!(out, " also={}", join(&also, ",")).unwrap();
                }
                out.push('\n');
            }
            Ok(out)
        }
        _ => Err(Error::InvalidParameter("give a family tag or -n".into())),
    }
}

fn diagram_json(d: &SmoothingDiagram) -> Value {
    let edges: Vec<Value> = d
        .edges
        .iter()
        .map(|&(i, j)| {
            let angles: Vec<Value> =
                d.angles_of((i, j)).iter().map(|&(k, w)| json!({ "vertex": k, "weight": w })).collect();
            json!({ "edge": [i, j], "angles": angles })
        })
        .collect();
    json!({ "n": d.n, "edges": edges })
}

fn diagram(b: &BiresidueMatrix, format: Option<Format>) -> Result<String> {
    let d = b.smoothing_diagram();
    Ok(match pick(format, &[Format::Text, Format::Json, Format::Dot, Format::Tikz, Format::Svg])? {
        Format::Json => pretty(diagram_json(&d)),
        Format::Dot => render_diagram(&d, DiagramFormat::Dot),
        Format::Tikz => render_diagram(&d, DiagramFormat::Tikz),
        Format::Svg => render_diagram(&d, DiagramFormat::Svg),
        _ => {
            let mut out = format!("n={} smoothable_edges={}\n", d.n, d.edges.len());
            for &(i, j) in &d.edges {
                let angles: Vec<String> = d
                    .angles_of((i, j))
                    .iter()
                    .map(|&(k, w)| format!("{}@{k}", if w == 2 { "dark" } else { "light" }))
                    .collect();
                writeln!(out, "{i}-{j} {}", angles.join(" ")).unwrap();
            }
            out
        }
    })
}

fn paths(v: &[Vec<usize>]) -> String {
    v.iter().map(|p| join(p, "-")).collect::<Vec<_>>().join(",")
}

fn classify(b: &BiresidueMatrix, format: Option<Format>) -> Result<String> {
    let f = pick(format, &[Format::Text, Format::Json])?;
    let comps = components(&b.smoothing_diagram())?;
    let id = identify(b)?;
    if f == Format::Json {
        let family = id.as_ref().map(|i| json!({ "tag": i.tag.to_string(), "sigma": i.sigma, "lambda": i.lambda.to_string() }));
        return Ok(pretty(json!({ "chains": comps.chains, "cycles": comps.cycles, "family": family })));
    }
    Ok(match id {
        Some(i) => format!("family={} sigma={} lambda={}\n", i.tag, join(&i.sigma, ","), i.lambda),
        None => format!("family=none chains={} cycles={}\n", paths(&comps.chains), paths(&comps.cycles)),
    })
}

fn rank(b: &BiresidueMatrix, format: Option<Format>) -> Result<String> {
    let f = pick(format, &[Format::Text, Format::Json])?;
    let (r, m) = (b.rank(), b.min_polydisc_dim());
    Ok(if f == Format::Json {
        pretty(json!({ "n": b.n(), "rank": r, "min_polydisc_dim": m }))
    } else {
        format!("n={} rank={r} min_polydisc_dim={m}\n", b.n())
    })
}

fn holonomic(b: &BiresidueMatrix, format: Option<Format>) -> Result<String> {
    let f = pick(format, &[Format::Text, Format::Json])?;
    let rep = is_holonomic(b);
    Ok(if f == Format::Json {
        pretty(serde_json::to_value(&rep).expect("report serializes"))
    } else {
        match &rep.witness {
            None => format!("holonomic=true subsets_checked={}\n", rep.subsets_checked),
            Some(w) => format!("holonomic=false witness={} subsets_checked={}\n", join(w, ","), rep.subsets_checked),
        }
    })
}

fn parse_range(s: &str) -> Result<Vec<f64>> {
    let bad = || Error::InvalidParameter(format!("--imtau expects a:b or a:b:step, got {s:?}"));
    let parts: Vec<f64> = s.split(':').map(|p| p.trim().parse::<f64>().map_err(|_| bad())).collect::<Result<_>>()?;
    let (a, b, step) = match parts.as_slice() {
        [a] => (*a, *a, 1.0),
        [a, b] => (*a, *b, 1.0),
        [a, b, st] => (*a, *b, *st),
        _ => return Err(bad()),
    };
    if !(step > 0.0 && a > 0.0 && b >= a && a.is_finite() && b.is_finite()) {
        return Err(bad());
    }
    let count = ((b - a) / step + 1e-9).floor() as usize + 1;
    if count > 10_000 {
        return Err(Error::InvalidParameter("--imtau range has too many points".into()));
    }
    Ok((0..count).map(|i| a + step * i as f64).collect())
}

fn fo(cmd: FoCmd, format: Option<Format>) -> Result<String> {
    match cmd {
        FoCmd::Limit { nk } => {
            let f = pick(format, &[Format::Text, Format::Json])?;
            let t = fo_toric(nk.n, nk.k)?;
            let kp = mod_inverse(nk.k as i64, nk.n as i64)?;
            let q1 = fo_q1(nk.n, nk.k)?;
            if f == Format::Json {
                let terms: Vec<Value> =
                    q1.iter().map(|t| json!({ "i": t.i, "monomial": [t.monomial.0, t.monomial.1], "bivector": [t.bivector.0, t.bivector.1] })).collect();
                let m: Value = serde_json::from_str(&to_json(&t.m)).expect("own json parses");
                return Ok(pretty(json!({ "n": nk.n, "k": nk.k, "k_prime": kp, "q0_over_2pi_i": m["b"], "q1": terms })));
            }
            let mut out = format!("# q0/(2 pi i) for n={} k={} (k'={kp})\n", nk.n, nk.k);
            out.push_str(&to_text(&t.m));
            out.push_str("# q1 summands\n");
            for t in &q1 {
                writeln!(out, "y{}*y{} d{}^d{}", t.monomial.0, t.monomial.1, t.bivector.0, t.bivector.1).unwrap();
            }
            Ok(out)
        }
        FoCmd::Verify { nk } => {
            let f = pick(format, &[Format::Text, Format::Json])?;
            let v = fo_verify(nk.n, nk.k)?;
            Ok(if f == Format::Json {
                pretty(serde_json::to_value(&v).expect("verification serializes"))
            } else {
                format!(
                    "n={} k={} k_tilde={} family=C:{},{} sigma={} lambda={}\nB Pi = I - U/n: ok\nq1 summands equal rho on edges {}\n",
                    v.n,
                    v.k,
                    v.k_tilde,
                    v.n,
                    v.k_tilde,
                    join(&v.sigma, ","),
                    v.lambda,
                    v.q1_edges.iter().map(|(i, j)| format!("{i}-{j}")).collect::<Vec<_>>().join(",")
                )
            })
        }
        FoCmd::Codim2 { nk } => {
            let f = pick(format, &[Format::Text, Format::Json])?;
            let s = codim2_split(nk.n, nk.k)?;
            Ok(if f == Format::Json {
                pretty(serde_json::to_value(&s).expect("split serializes"))
            } else {
                format!("n1={} n2={} k1={} k2={} cf={}\n", s.n1, s.n2, s.k1, s.k2, join(&s.cf, ","))
            })
        }
        FoCmd::Sweep { nk, imtau } => {
            let f = pick(format, &[Format::Csv, Format::Text, Format::Json])?;
            let rows = fo_sweep(nk.n, nk.k, &parse_range(&imtau)?)?;
            Ok(if f == Format::Json {
                pretty(serde_json::to_value(&rows).expect("rows serialize"))
            } else {
                let mut out = String::from(SweepRow::csv_header());
                out.push('\n');
                for r in &rows {
                    out.push_str(&r.csv());
                    out.push('\n');
                }
                out
            })
        }
    }
}

fn preset_of(name: ExampleName) -> Preset {
    match name {
        ExampleName::X4 => Preset::X4,
        ExampleName::C41 => Preset::C41,
        ExampleName::X5 => Preset::X5,
    }
}

fn deform(cmd: DeformCmd, format: Option<Format>) -> Result<String> {
    match cmd {
        DeformCmd::Rho { src, preset, edge, m } => {
            let f = pick(format, &[Format::Text, Format::Json])?;
            let r = match preset {
                Some(p) => SemiToricRealization::preset(preset_of(p.parse()?))?,
                None => {
                    let b = load(&src)?;
                    match m {
                        Some(m) => SemiToricRealization::realize(&b, m)?,
                        None => SemiToricRealization::minimal(&b)?,
                    }
                }
            };
            let (i, j) = (edge[0], edge[1]);
            if !r.b.is_smoothable(i, j) {
                return Err(Error::InvalidParameter(format!("edge ({i},{j}) is not smoothable")));
            }
            let rho = r.build_rho(i, j)?;
            let theta: Vec<String> = rho.theta.theta.iter().map(|t| t.to_string()).collect();
            let lambda: Vec<String> = rho.lambda.iter().map(|t| t.to_string()).collect();
            Ok(if f == Format::Json {
                pretty(json!({ "edge": [i, j], "m": r.m, "theta": theta, "lambda": lambda, "bivector": rho.bivector.render() }))
            } else {
                format!(
                    "edge={i},{j} m={} theta={} lambda={}\n{}",
                    r.m,
                    theta.join(","),
                    lambda.join(","),
                    rho.bivector.render()
                )
            })
        }
        DeformCmd::Check { name } => {
            let f = pick(format, &[Format::Text, Format::Json])?;
            let ex = ExampleDeformation::new(name.parse()?)?;
            ex.verify()?;
            let pf = ex.pfaffian()?.render(&ex.sig);
            let us: Vec<(String, String)> = (0..ex.sig.n_x)
                .map(|l| Ok((ex.sig.x_name(l), ex.hamiltonian(l)?.render())))
                .collect::<Result<_>>()?;
            if f == Format::Json {
                let u: Vec<Value> = us.iter().map(|(x, r)| json!({ "x": x, "u": r })).collect();
                return Ok(pretty(json!({
                    "name": ex.name.to_string(),
                    "master_equation": "ok",
                    "ansatz": ex.ansatz.render(),
                    "derivations": ex.render_table(),
                    "pfaffian": pf,
                    "hamiltonian": u,
                })));
            }
            let mut out = format!("{}: [pi, pi] = 0 modulo the derivation table\n", ex.name);
            if ex.sig.n_x > 1 {
                out.push_str("mixed partial derivatives agree\n");
            }
            out.push_str("# derivations\n");
            out.push_str(&ex.render_table());
            writeln!(out, "# pfaffian\n{pf}").unwrap();
            for (x, u) in us {
                writeln!(out, "# [pi, {x}]").unwrap();
                out.push_str(&u);
            }
            Ok(out)
        }
        DeformCmd::Integrate { name, eps, xmax, step, csv } => {
            let f = pick(format, &[Format::Csv, Format::Text, Format::Json])?;
            let ex = ExampleDeformation::new(name.parse()?)?;
            let rep = integrate(&ex, &IntegrationOptions { eps, xmax, step, sample_y: None })?;
            let summary = format!(
                "max_residual={} max_pfaffian_rel_error={} samples={}\n",
                sci(rep.max_residual),
                sci(rep.max_pfaffian_rel_error),
                rep.samples.len()
            );
            if let Some(path) = csv {
                std::fs::write(&path, rep.to_csv()).map_err(|e| Error::InvalidParameter(format!("{path}: {e}")))?;
                return Ok(summary);
            }
            Ok(match f {
                Format::Json => pretty(serde_json::to_value(&rep).expect("report serializes")),
                _ => rep.to_csv(),
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranges() {
        assert_eq!(parse_range("4:7").unwrap(), vec![4.0, 5.0, 6.0, 7.0]);
        assert_eq!(parse_range("4:5:0.5").unwrap(), vec![4.0, 4.5, 5.0]);
        assert_eq!(parse_range("6").unwrap(), vec![6.0]);
        assert!(parse_range("7:4").is_err());
        assert!(parse_range("0:3").is_err());
        assert!(parse_range("a:b").is_err());
    }
}
