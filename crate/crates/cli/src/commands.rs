use std::time::Duration;

use juhl_kit::backends::{evaluate_q, oracle_q, EinsteinBackend, EinsteinModel};
use juhl_kit::exact::{is_integral, parse_rational, rat};
use juhl_kit::verify::{parse_suites, run_suites, SuiteReport, VerifyOptions};
use juhl_kit::{
    compositions_of, expand_p_explicit, expand_p_recursive, expand_q_explicit, expand_q_recursive, m_coeff, n_coeff,
    nbar_coeff, Rational,
};
use serde::Serialize;

use crate::render::{self, SCHEMA};
use crate::{Failure, Form, Format, Target};

pub struct Output {
    pub text: String,
    pub passed: bool,
}

impl Output {
    fn ok(text: String) -> Self {
        Output { text, passed: true }
    }
}

fn check_order(n: u32, what: &str) -> Result<(), Failure> {
    if n < 1 {
        return Err(Failure::Usage(format!("{what} must be at least 1")));
    }
    Ok(())
}

#[derive(Serialize)]
struct ConstantsDoc {
    schema: &'static str,
    target: &'static str,
    #[serde(rename = "N")]
    n: u32,
    rows: Vec<ConstantsRow>,
}

#[derive(Serialize)]
struct ConstantsRow {
    composition: Vec<u32>,
    n: String,
    m: String,
    nbar: String,
}

pub fn constants(n: u32, format: Format) -> Result<Output, Failure> {
    check_order(n, "N")?;
    let rows: Vec<ConstantsRow> = compositions_of(n as i64)?
        .iter()
        .map(|c| ConstantsRow {
            composition: c.parts().to_vec(),
            n: render::rational(&n_coeff(c)),
            m: render::rational(&m_coeff(c)),
            nbar: render::rational(&nbar_coeff(c)),
        })
        .collect();
    let text = match format {
        Format::Json => render::json(&ConstantsDoc { schema: SCHEMA, target: "constants", n, rows }),
        Format::Tsv => render::tsv(
            &["composition", "n", "m", "nbar"],
            rows.into_iter().map(|r| vec![render::parts(&r.composition), r.n, r.m, r.nbar]),
        ),
    };
    Ok(Output::ok(text))
}

#[derive(Serialize)]
struct ExpansionDoc {
    schema: &'static str,
    target: &'static str,
    #[serde(rename = "N")]
    n: u32,
    form: &'static str,
    basis: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    sign_convention: Option<&'static str>,
    terms: Vec<Term>,
}

#[derive(Serialize)]
struct Term {
    word: Vec<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    a: Option<u32>,
    coeff: String,
}

pub fn expand(target: Target, n: u32, form: Form, format: Format) -> Result<Output, Failure> {
    check_order(n, "N")?;
    let terms: Vec<Term> = match target {
        Target::P => {
            let p = match form {
                Form::Explicit => expand_p_explicit(n)?,
                Form::Recursive => expand_p_recursive(n)?,
            };
            p.poly
                .terms()
                .map(|(w, c)| Term { word: w.letters().to_vec(), a: None, coeff: render::rational(c) })
                .collect()
        }
        Target::Q => {
            let q = match form {
                Form::Explicit => expand_q_explicit(n)?,
                Form::Recursive => expand_q_recursive(n)?,
            };
            q.terms()
                .map(|(k, c)| Term { word: k.word.letters().to_vec(), a: Some(k.a), coeff: render::rational(c) })
                .collect()
        }
    };
    let doc = ExpansionDoc {
        schema: SCHEMA,
        target: match target {
            Target::P => "P",
            Target::Q => "Q",
        },
        n,
        form: match form {
            Form::Explicit => "explicit",
            Form::Recursive => "recursive",
        },
        basis: "M",
        sign_convention: (target == Target::Q).then_some("(-1)^N Q"),
        terms,
    };
    let text = match format {
        Format::Json => render::json(&doc),
        Format::Tsv => {
            let rows = doc.terms.into_iter().map(|t| {
                let mut row = vec![render::parts(&t.word)];
                if let Some(a) = t.a {
                    row.push(a.to_string());
                }
                row.push(t.coeff);
                row
            });
            match target {
                Target::P => render::tsv(&["word", "coeff"], rows),
                Target::Q => render::tsv(&["word", "a", "coeff"], rows),
            }
        }
    };
    Ok(Output::ok(text))
}

#[derive(Serialize)]
struct VerifyDoc {
    schema: &'static str,
    target: &'static str,
    passed: bool,
    suites: Vec<SuiteDoc>,
}

#[derive(Serialize)]
struct SuiteDoc {
    suite: String,
    max_order: u32,
    seed: u64,
    instances: usize,
    passed: bool,
    failures: Vec<FailureDoc>,
}

#[derive(Serialize)]
struct FailureDoc {
    instance: String,
    computed: String,
    expected: String,
}

fn suite_doc(r: &SuiteReport) -> SuiteDoc {
    SuiteDoc {
        suite: r.suite.name().to_string(),
        max_order: r.max_order,
        seed: r.seed,
        instances: r.instances,
        passed: r.passed(),
        failures: r
            .failures
            .iter()
            .map(|f| FailureDoc {
                instance: f.instance.clone(),
                computed: f.computed.clone(),
                expected: f.expected.clone(),
            })
            .collect(),
    }
}

pub fn verify(
    suites: &[String],
    max_order: Option<u32>,
    seed: u64,
    jobs: Option<usize>,
    inject_fault: bool,
    format: Format,
) -> Result<Output, Failure> {
    let suites = parse_suites(suites)?;
    if let Some(m) = max_order {
        check_order(m, "max order")?;
    }
    let options = VerifyOptions { max_order, seed, inject_fault };
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(j) = jobs {
        if j == 0 {
            return Err(Failure::Usage("--jobs must be at least 1".into()));
        }
        builder = builder.num_threads(j);
    }
    let pool = builder.build().map_err(|e| Failure::Usage(e.to_string()))?;
    let reports = pool.install(|| run_suites(&suites, &options))?;
    let total: Duration = reports.iter().map(|r| r.wall_time).sum();
    for r in &reports {
        eprintln!("{}: {} instances in {:.3}s", r.suite, r.instances, r.wall_time.as_secs_f64());
    }
    eprintln!("total {:.3}s", total.as_secs_f64());
    let passed = reports.iter().all(SuiteReport::passed);
    let text = match format {
        Format::Json => render::json(&VerifyDoc {
            schema: SCHEMA,
            target: "verify",
            passed,
            suites: reports.iter().map(suite_doc).collect(),
        }),
        Format::Tsv => {
            let mut rows = Vec::new();
            for r in &reports {
                let status = if r.passed() { "PASS" } else { "FAIL" };
                rows.push(vec![
                    r.suite.name().to_string(),
                    r.max_order.to_string(),
                    r.instances.to_string(),
                    r.failures.len().to_string(),
                    status.to_string(),
                ]);
            }
            let mut text = render::tsv(&["suite", "max_order", "instances", "failures", "status"], rows);
            for r in &reports {
                for f in &r.failures {
                    text.push_str(&format!(
                        "counterexample\t{}\t{}\t{}\t{}\n",
                        r.suite, f.instance, f.computed, f.expected
                    ));
                }
            }
            text
        }
    };
    Ok(Output { text, passed })
}

#[derive(Serialize)]
struct EinsteinDoc {
    schema: &'static str,
    target: &'static str,
    n: String,
    c: String,
    rows: Vec<EinsteinRow>,
}

#[derive(Serialize)]
struct EinsteinRow {
    #[serde(rename = "N")]
    order: u32,
    #[serde(rename = "W")]
    w: String,
    #[serde(rename = "Q")]
    q: String,
    regime: &'static str,
}

fn parse_arg(s: &str, name: &str) -> Result<Rational, Failure> {
    parse_rational(s).map_err(|e| Failure::Usage(format!("--{name}: {e}")))
}

pub fn einstein(dim: &str, c: &str, max_order: u32, format: Format) -> Result<Output, Failure> {
    check_order(max_order, "max order")?;
    let n = parse_arg(dim, "dim")?;
    let c = parse_arg(c, "c")?;
    let backend = EinsteinBackend::new(EinsteinModel::new(n.clone(), c.clone()), max_order as usize)?;
    // orders above n/2 in even dimension n
    let critical = (is_integral(&n) && is_integral(&(&n / rat(2)))).then(|| &n / rat(2));
    let mut rows = Vec::with_capacity(max_order as usize);
    for order in 1..=max_order {
        let formula = evaluate_q(&expand_q_explicit(order)?, &backend)?;
        let oracle = oracle_q(&backend, order)?;
        if formula != oracle {
            return Err(Failure::Identity(format!(
                "N={order}: explicit formula gives {formula}, iteration gives {oracle}"
            )));
        }
        let q = if order % 2 == 0 { formula } else { -formula };
        let extension = critical.as_ref().is_some_and(|half| rat(order as i64) > *half);
        rows.push(EinsteinRow {
            order,
            w: render::rational(&backend.invariants.w[order as usize - 1]),
            q: render::rational(&q),
            regime: if extension { "extension" } else { "standard" },
        });
    }
    let text = match format {
        Format::Json => render::json(&EinsteinDoc {
            schema: SCHEMA,
            target: "einstein",
            n: render::rational(&n),
            c: render::rational(&c),
            rows,
        }),
        Format::Tsv => render::tsv(
            &["N", "W", "Q", "regime"],
            rows.into_iter().map(|r| vec![r.order.to_string(), r.w, r.q, r.regime.to_string()]),
        ),
    };
    Ok(Output::ok(text))
}
