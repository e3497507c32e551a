use clap::{Parser, Subcommand, ValueEnum};
use kanrw::automata::{irreducible_acceptor, regex_for_object};
use kanrw::idrel::{IdrelContext, IdrelError};
use kanrw::kan::{
    complete_kan, enumerate_kan, initial_rules, KanInput, KanOverflow, KanPresentation, MixedRewriteSystem, SpecialCase,
};
use kanrw::machines::{build_cayley, build_moore, cayley_normal_form, CayleyError, InverseMode};
use kanrw::ncpoly::{algebra_dimension, buchberger, monomial_text, reduce_poly, Dimension, NcPoly, PolyError};
use kanrw::presentations::{
    complete, complete_presentation, parse_exponent_word, word_text, CompletionBudget, GroupInput, GroupPresentation,
    PresentationInput,
};
use serde::de::DeserializeOwned;
use serde::Deserialize;
use serde_json::{json, Value};
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser, Debug)]
#[command(name = "kanrw", version, about = "Rewriting for Kan extensions, groups and algebras")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Enumeration limit for extensions, machines and Cayley graphs.
    #[arg(long, global = true, env = "KANRW_LIMIT", default_value_t = 1000,
          value_parser = clap::value_parser!(u64).range(1..))]
    limit: u64,
    /// Completion stops once the system holds more rules than this.
    #[arg(long, global = true, default_value_t = 10000, value_parser = clap::value_parser!(u64).range(1..))]
    max_rules: u64,
    /// Completion stops after this many passes over the critical pairs.
    #[arg(long, global = true, default_value_t = 100, value_parser = clap::value_parser!(u64).range(1..))]
    max_passes: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Kan extension data, or any of the special cases.
    Kan {
        #[command(subcommand)]
        action: KanAction,
    },
    /// Knuth-Bendix completion of a monoid, group or category presentation.
    Kb {
        #[command(subcommand)]
        action: KbAction,
    },
    /// Coset representatives of a subgroup.
    Coset { input: PathBuf },
    /// Orbits of a group action on a finite set.
    Orbit { input: PathBuf },
    /// Conjugacy classes of a finite group.
    Conjugacy { input: PathBuf },
    /// Colimit of a diagram of finite sets.
    Colimit { input: PathBuf },
    /// Moore machine computing normal forms of a finite extension.
    Moore { input: PathBuf },
    /// Cayley graph of a finite group with its spanning tree.
    Cayley {
        input: PathBuf,
        /// Word to normalise by walking the graph, e.g. `aba^3b`.
        #[arg(long)]
        word: Option<String>,
    },
    /// Noncommutative Gröbner basis and algebra dimension.
    Ncgb { input: PathBuf },
    /// Reduces the input targets (and any --poly) by the input polynomials.
    Ncreduce {
        input: PathBuf,
        #[arg(long)]
        poly: Vec<String>,
    },
    /// Identities among relations of a finite group presentation.
    Idrel { input: PathBuf },
}

#[derive(Subcommand, Debug)]
enum KanAction {
    Complete { input: PathBuf },
    Enumerate { input: PathBuf },
    Regex {
        input: PathBuf,
        #[arg(long)]
        object: String,
    },
}

#[derive(Subcommand, Debug)]
enum KbAction {
    Complete { input: PathBuf },
}

/// A rendered result: text for people, JSON for programs.
struct Report {
    text: Vec<String>,
    json: Value,
}

enum Failure {
    Parse(String),
    Validation(String),
    Budget { message: String, partial: Report },
}

impl Failure {
    fn status(&self) -> u8 {
        match self {
            Failure::Parse(_) => 2,
            Failure::Validation(_) => 3,
            Failure::Budget { .. } => 4,
        }
    }
}

type Outcome = Result<Report, Failure>;

struct Config {
    limit: usize,
    budget: CompletionBudget,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cfg = Config {
        limit: cli.limit as usize,
        budget: CompletionBudget { max_rules: cli.max_rules as usize, max_passes: cli.max_passes as usize },
    };
    let out = match &cli.command {
        Command::Kan { action: KanAction::Complete { input } } => kan_complete(input, &cfg),
        Command::Kan { action: KanAction::Enumerate { input } } => kan_enumerate(input, &cfg, None),
        Command::Kan { action: KanAction::Regex { input, object } } => kan_regex(input, object, &cfg),
        Command::Kb { action: KbAction::Complete { input } } => kb_complete(input, &cfg),
        Command::Coset { input } => kan_enumerate(input, &cfg, Some(&["coset"])),
        Command::Orbit { input } => kan_enumerate(input, &cfg, Some(&["orbit"])),
        Command::Conjugacy { input } => kan_enumerate(input, &cfg, Some(&["conjugacy"])),
        Command::Colimit { input } => kan_enumerate(input, &cfg, Some(&["colimit", "equivalence"])),
        Command::Moore { input } => moore(input, &cfg),
        Command::Cayley { input, word } => cayley(input, word.as_deref(), &cfg),
        Command::Ncgb { input } => ncgb(input, &cfg),
        Command::Ncreduce { input, poly } => ncreduce(input, poly),
        Command::Idrel { input } => idrel(input, &cfg),
    };
    match out {
        Ok(report) => {
            emit(&report, cli.format);
            ExitCode::SUCCESS
        }
        Err(f) => {
            let status = f.status();
            match f {
                Failure::Parse(m) => eprintln!("parse error: {m}"),
                Failure::Validation(m) => eprintln!("invalid input: {m}"),
                Failure::Budget { message, partial } => {
                    eprintln!("{message}");
                    emit(&partial, cli.format);
                }
            }
            ExitCode::from(status)
        }
    }
}

fn emit(r: &Report, format: Format) {
    // a closed pipe (e.g. `| head`) just ends the output
    let mut out = std::io::stdout().lock();
    let _ = match format {
        Format::Text => r.text.iter().try_for_each(|line| writeln!(out, "{line}")),
        Format::Json => writeln!(out, "{}", serde_json::to_string_pretty(&r.json).expect("serializable")),
    };
}

// ---------------------------------------------------------------------------
// input

fn read_value(path: &Path) -> Result<Value, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::Parse(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Failure::Parse(format!("{}: {e}", path.display())))
}

fn from_value<T: DeserializeOwned>(path: &Path, v: Value) -> Result<T, Failure> {
    serde_json::from_value(v).map_err(|e| Failure::Parse(format!("{}: {e}", path.display())))
}

fn invalid(e: impl std::fmt::Display) -> Failure {
    Failure::Validation(e.to_string())
}

/// Kan data is either a full presentation or a special case with a `kind`.
fn load_kan(path: &Path, kinds: Option<&[&str]>) -> Result<KanPresentation, Failure> {
    let v = read_value(path)?;
    match v.get("kind").and_then(Value::as_str) {
        Some(kind) => {
            if let Some(allowed) = kinds {
                if !allowed.contains(&kind) {
                    return Err(Failure::Validation(format!("expected kind {}, found `{kind}`", allowed.join(" or "))));
                }
            }
            from_value::<SpecialCase>(path, v)?.build().map_err(invalid)
        }
        None if kinds.is_some() => Err(Failure::Validation("input has no `kind`".into())),
        None => KanPresentation::validate(&from_value::<KanInput>(path, v)?).map_err(invalid),
    }
}

fn load_group(path: &Path) -> Result<GroupPresentation, Failure> {
    let input: GroupInput = from_value(path, read_value(path)?)?;
    GroupPresentation::from_input(&input).map_err(invalid)
}

#[derive(Deserialize)]
struct AlgebraInput {
    generators: Vec<String>,
    polynomials: Vec<String>,
    #[serde(default)]
    targets: Vec<String>,
}

fn load_algebra(path: &Path) -> Result<(AlgebraInput, Vec<NcPoly>), Failure> {
    let a: AlgebraInput = from_value(path, read_value(path)?)?;
    let ps = parse_polys(&a.polynomials, &a.generators)?;
    Ok((a, ps))
}

fn parse_polys(texts: &[String], names: &[String]) -> Result<Vec<NcPoly>, Failure> {
    texts.iter().map(|t| NcPoly::parse(t, names).map_err(|e| Failure::Parse(format!("`{t}`: {e}")))).collect()
}

// ---------------------------------------------------------------------------
// Kan extensions

fn rule_lines(p: &KanPresentation, r: &MixedRewriteSystem) -> Vec<String> {
    r.oriented().rules.iter().map(|x| p.rule_text(x)).collect()
}

fn completed(p: &KanPresentation, cfg: &Config) -> Result<MixedRewriteSystem, Failure> {
    complete_kan(&initial_rules(p), cfg.budget).map_err(|e| {
        let rules = rule_lines(p, &e.partial);
        let mut text = vec![format!("partial system ({} rules):", rules.len())];
        text.extend(rules.iter().map(|l| format!("  {l}")));
        Failure::Budget {
            message: format!("completion budget exhausted after {} passes", e.passes),
            partial: Report { text, json: json!({ "complete": false, "passes": e.passes, "rules": rules }) },
        }
    })
}

fn kan_complete(path: &Path, cfg: &Config) -> Outcome {
    let p = load_kan(path, None)?;
    let r = completed(&p, cfg)?;
    let rules = rule_lines(&p, &r);
    let mut text = vec![format!("{} rules:", rules.len())];
    text.extend(rules.iter().map(|l| format!("  {l}")));
    Ok(Report { text, json: json!({ "complete": true, "rules": rules }) })
}

fn overflow_report(p: &KanPresentation, e: &KanOverflow) -> Report {
    let rules = rule_lines(p, &e.rules);
    let mut text = vec![format!("enumeration limit of {} exceeded", e.limit), format!("{} rules:", rules.len())];
    text.extend(rules.iter().map(|l| format!("  {l}")));
    Report { text, json: json!({ "overflow": true, "limit": e.limit, "rules": rules }) }
}

fn kan_enumerate(path: &Path, cfg: &Config, kinds: Option<&[&str]>) -> Outcome {
    let p = load_kan(path, kinds)?;
    let r = completed(&p, cfg)?;
    let rules = rule_lines(&p, &r);
    let k = match enumerate_kan(&r, &p, cfg.limit) {
        Ok(k) => k,
        Err(e) => return Ok(overflow_report(&p, &e)),
    };
    let mut text = vec![format!("{} rules:", rules.len())];
    text.extend(rules.iter().map(|l| format!("  {l}")));
    let mut objects = serde_json::Map::new();
    for (b, name) in p.delta.objects.iter().enumerate() {
        let terms: Vec<String> =
            k.by_object.get(&b).into_iter().flatten().map(|&i| p.term_text(&k.terms[i])).collect();
        text.push(format!("K{name} ({}): {}", terms.len(), terms.join(", ")));
        objects.insert(name.clone(), json!(terms));
    }
    let epsilon: Vec<(String, String)> =
        p.elements.iter().zip(&k.epsilon).map(|(x, &i)| (x.clone(), p.term_text(&k.terms[i]))).collect();
    text.push("epsilon:".into());
    text.extend(epsilon.iter().map(|(x, t)| format!("  {x} -> {t}")));
    let action: Vec<(String, String, String)> = k
        .action
        .iter()
        .map(|(&(i, b), &j)| (p.term_text(&k.terms[i]), p.delta.arrows[b].label.clone(), p.term_text(&k.terms[j])))
        .collect();
    Ok(Report {
        text,
        json: json!({ "overflow": false, "rules": rules, "elements": objects, "epsilon": epsilon, "action": action }),
    })
}

fn kan_regex(path: &Path, object: &str, cfg: &Config) -> Outcome {
    let p = load_kan(path, None)?;
    let b = p.delta.object(object).map_err(invalid)?;
    let r = completed(&p, cfg)?;
    let acc = irreducible_acceptor(&p, &r);
    let re = regex_for_object(&acc, b).map_err(invalid)?;
    let text = re.text(&p.letter_names());
    Ok(Report { text: vec![format!("K{object} = {text}")], json: json!({ "object": object, "regex": text }) })
}

fn kb_complete(path: &Path, cfg: &Config) -> Outcome {
    let v = read_value(path)?;
    let pres = if v.get("objects").is_some() {
        from_value::<PresentationInput>(path, v)?.build().map_err(invalid)?
    } else {
        let input: GroupInput = from_value(path, v)?;
        GroupPresentation::from_input(&input).map_err(invalid)?.category()
    };
    let render = |done: &kanrw::presentations::CompletedPresentation| -> Vec<String> {
        done.rules.iter().map(|r| r.text(&done.graph)).collect()
    };
    match complete_presentation(&pres, cfg.budget) {
        Ok(done) => {
            let rules = render(&done);
            let mut text = vec![format!("{} rules:", rules.len())];
            text.extend(rules.iter().map(|l| format!("  {l}")));
            Ok(Report { text, json: json!({ "complete": true, "rules": rules }) })
        }
        Err(e) => {
            let rules = render(&e.partial);
            let mut text = vec![format!("partial system ({} rules):", rules.len())];
            text.extend(rules.iter().map(|l| format!("  {l}")));
            Err(Failure::Budget {
                message: "completion budget exhausted".into(),
                partial: Report { text, json: json!({ "complete": false, "rules": rules }) },
            })
        }
    }
}

// ---------------------------------------------------------------------------
// machines

fn moore(path: &Path, cfg: &Config) -> Outcome {
    let p = load_kan(path, None)?;
    let r = completed(&p, cfg)?;
    let m = match build_moore(&p, &r, cfg.limit) {
        Ok(m) => m,
        Err(e) => return Ok(overflow_report(&p, &e)),
    };
    let outputs: Vec<String> =
        m.output.iter().map(|o| o.as_ref().map(|t| p.term_text(t)).unwrap_or_else(|| "0".into())).collect();
    let transitions: Vec<(String, String, String)> = m
        .nontrivial()
        .into_iter()
        .map(|(s, a, t)| (m.states[s].clone(), m.letters[a].clone(), m.states[t].clone()))
        .collect();
    let mut text = vec![format!("{} states:", m.states.len())];
    text.extend(m.states.iter().zip(&outputs).map(|(s, o)| format!("  {s} / {o}")));
    text.push(format!("{} non-trivial transitions:", transitions.len()));
    text.extend(transitions.iter().map(|(s, a, t)| format!("  {s} -{a}-> {t}")));
    Ok(Report { text, json: json!({ "states": m.states, "outputs": outputs, "transitions": transitions }) })
}

fn cayley(path: &Path, word: Option<&str>, cfg: &Config) -> Outcome {
    let gp = load_group(path)?;
    let rules = complete(gp.rules.clone(), cfg.budget).map_err(|e| {
        let rules: Vec<String> = e.rules.iter().map(|(l, r)| format!("{} -> {}", gp.text(l), gp.text(r))).collect();
        Failure::Budget {
            message: format!("completion budget exhausted after {} passes", e.passes),
            partial: Report { text: rules.clone(), json: json!({ "complete": false, "rules": rules }) },
        }
    })?;
    let g = match build_cayley(&gp.letters, &rules, cfg.limit) {
        Ok(g) => g,
        Err(CayleyError::Overflow(n)) => {
            return Ok(Report {
                text: vec![format!("group has more than {n} elements")],
                json: json!({ "overflow": true, "limit": n }),
            })
        }
        Err(e) => return Err(invalid(e)),
    };
    let labels: Vec<String> = (0..g.len()).map(|v| g.label_text(v)).collect();
    let edges: Vec<(String, String, String, bool)> = g
        .edges
        .iter()
        .map(|e| (labels[e.src].clone(), g.letters[e.letter].clone(), labels[e.tgt].clone(), e.tree))
        .collect();
    let mut text = vec![format!("{} elements: {}", labels.len(), labels.join(", "))];
    text.extend(edges.iter().map(|(s, a, t, tree)| format!("  [{s},{a}] -> {t}{}", if *tree { " (tree)" } else { "" })));
    let mut out = json!({ "overflow": false, "elements": labels, "edges": edges });
    if let Some(w) = word {
        let syl = parse_exponent_word(w, &gp.letters).map_err(|e| Failure::Parse(e.to_string()))?;
        let v = cayley_normal_form(&g, &syl, InverseMode::Backwards).map_err(invalid)?;
        text.push(format!("N({w}) = {}", labels[v]));
        out["normal_form"] = json!(labels[v]);
    }
    Ok(Report { text, json: out })
}

// ---------------------------------------------------------------------------
// algebras

fn ncgb(path: &Path, cfg: &Config) -> Outcome {
    let (a, ps) = load_algebra(path)?;
    let names = &a.generators;
    let render = |gb: &[NcPoly]| -> Vec<String> { gb.iter().map(|p| p.text(names)).collect() };
    let gb = buchberger(&ps, cfg.budget).map_err(|e| match e {
        PolyError::Budget { ref partial, passes } => {
            let basis = render(partial);
            Failure::Budget {
                message: format!("completion budget exhausted after {passes} passes"),
                partial: Report { text: basis.clone(), json: json!({ "complete": false, "basis": basis }) },
            }
        }
        other => invalid(other),
    })?;
    let basis = render(&gb);
    let mut text = vec![format!("{} polynomials:", basis.len())];
    text.extend(basis.iter().map(|p| format!("  {p}")));
    let dimension = match algebra_dimension(&gb, names) {
        Dimension::Finite(words) => {
            let ms: Vec<String> = words.iter().map(|m| monomial_text(m, names)).collect();
            text.push(format!("dimension {}: {}", ms.len(), ms.join(", ")));
            json!({ "finite": true, "dimension": ms.len(), "monomials": ms })
        }
        Dimension::Infinite(re) => {
            let r = re.text(names);
            text.push(format!("infinite dimension; irreducible monomials {r}"));
            json!({ "finite": false, "regex": r })
        }
    };
    Ok(Report { text, json: json!({ "complete": true, "basis": basis, "dimension": dimension }) })
}

fn ncreduce(path: &Path, extra: &[String]) -> Outcome {
    let (a, ps) = load_algebra(path)?;
    let mut texts = a.targets.clone();
    texts.extend(extra.iter().cloned());
    let targets = parse_polys(&texts, &a.generators)?;
    let mut text = Vec::new();
    let mut out = Vec::new();
    for (t, p) in texts.iter().zip(&targets) {
        let nf = reduce_poly(p, &ps).text(&a.generators);
        text.push(format!("{} -> {nf}", p.text(&a.generators)));
        out.push(json!({ "input": t, "normal_form": nf }));
    }
    Ok(Report { text, json: json!({ "reductions": out }) })
}

// ---------------------------------------------------------------------------
// identities

fn idrel(path: &Path, cfg: &Config) -> Outcome {
    let gp = load_group(path)?;
    let ctx = match IdrelContext::new(&gp, cfg.budget, cfg.limit) {
        Ok(c) => c,
        Err(IdrelError::Cayley(CayleyError::Overflow(n))) => {
            return Ok(Report {
                text: vec![format!("group has more than {n} elements")],
                json: json!({ "overflow": true, "limit": n }),
            })
        }
        Err(IdrelError::Budget { partial, passes }) => {
            let rules: Vec<String> =
                partial.iter().map(|r| format!("{} -> {}", word_text(&gp.letters, &r.lhs), word_text(&gp.letters, &r.rhs))).collect();
            return Err(Failure::Budget {
                message: format!("completion budget exhausted after {passes} passes"),
                partial: Report { text: rules.clone(), json: json!({ "complete": false, "rules": rules }) },
            });
        }
        Err(e) => return Err(invalid(e)),
    };
    let rec = ctx.record();
    let mut text = vec![
        format!("free: {}", rec.free.join(", ")),
        format!("rels: {}", rec.rels.iter().map(|(l, w)| format!("{l} = {w}")).collect::<Vec<_>>().join(", ")),
        format!("elF: {}", rec.el_f.join(", ")),
        format!("K: {}", rec.k.iter().map(|(l, r)| format!("{l} -> {r}")).collect::<Vec<_>>().join(", ")),
        format!("{} identities:", rec.idents.len()),
    ];
    for ident in &rec.idents {
        let terms: Vec<String> = ident.iter().map(|(r, u)| format!("({r}, {u})")).collect();
        text.push(format!("  [{}]", terms.join(" ")));
    }
    text.push(format!("isIdsRecord: {}", rec.is_ids_record));
    let json = serde_json::to_value(&rec).expect("serializable");
    Ok(Report { text, json })
}
