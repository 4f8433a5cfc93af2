//! The `check`, `derive` and `cohomology` commands, independent of argument
//! parsing and of the process: each returns its report and exit code.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use exact_couples::category::{
    is_strict, semistable_cokernel, semistable_kernel, ProbeConfig, Strictness,
};
use exact_couples::complex::FilteredComplex;
use exact_couples::couple::{
    check_exactness, derive_both, differential, iterate, validate_couple, Couple, IterateConfig,
    Sides, Tree,
};
use exact_couples::filt::Filt;
use exact_couples::generators::massey_couple;
use exact_couples::oracle;
use exact_couples::vect::Vect;

use crate::document::{
    couple_doc, parse, to_canonical, Backend, CertificateDoc, CoupleDoc, Document, LoadedCouple,
    NodeDoc, OmegaDoc, OracleDoc, RawCouple, TreeDoc, FORMAT_VERSION,
};

/// Stable exit codes.
pub const EXIT_OK: u8 = 0;
pub const EXIT_INVALID: u8 = 1;
pub const EXIT_USAGE: u8 = 2;

#[derive(Clone, Debug, Default)]
pub struct Options {
    pub certificate: bool,
    pub seed: u64,
    pub probes: usize,
    pub parallel: bool,
}

impl Options {
    fn probe_config(&self) -> ProbeConfig {
        ProbeConfig {
            probes: self.probes,
            seed: self.seed,
            max_dim: 3,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub code: u8,
    /// Report for standard output.
    pub report: String,
    /// Diagnostics for standard error.
    pub errors: String,
}

impl Outcome {
    fn usage(message: impl std::fmt::Display) -> Self {
        Outcome {
            code: EXIT_USAGE,
            report: String::new(),
            errors: format!("error: {message}\n"),
        }
    }
}

/// A couple read from disk, and the complex it came from if any.
pub struct Input {
    pub couple: LoadedCouple,
    pub complex: Option<FilteredComplex>,
}

pub fn load(path: &Path) -> Result<Input, Outcome> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Outcome::usage(format!("{}: {e}", path.display())))?;
    let doc = parse(&text).map_err(|e| Outcome::usage(format!("{}: {e}", path.display())))?;
    match doc {
        Document::Couple(c) => Ok(Input {
            couple: c
                .load()
                .map_err(|e| Outcome::usage(format!("{}: {e}", path.display())))?,
            complex: None,
        }),
        Document::Complex(c) => {
            let fc = c
                .load()
                .map_err(|e| Outcome::usage(format!("{}: {e}", path.display())))?;
            let couple = massey_couple(&fc).map_err(|e| Outcome {
                code: EXIT_INVALID,
                report: String::new(),
                errors: format!("error: exact couple of the complex: {e}\n"),
            })?;
            Ok(Input {
                couple: LoadedCouple::Vect(RawCouple {
                    alpha: couple.alpha().clone(),
                    beta: couple.beta().clone(),
                    gamma: couple.gamma().clone(),
                }),
                complex: Some(fc),
            })
        }
        Document::Tree(_) => Err(Outcome::usage(format!(
            "{}: a tree document is a derivation result, not an input",
            path.display()
        ))),
    }
}

fn yes(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn describe_complex(out: &mut String, fc: &FilteredComplex) {
    let _ = writeln!(
        out,
        "input      filtered complex, degrees {}, levels {}, total dim {}",
        fc.dims().len(),
        fc.levels() - 1,
        fc.total_dim()
    );
}

fn strictness_line<B: Backend>(cat: &B, name: &str, f: &B::Morphism, certificate: bool) -> String {
    match is_strict(cat, f) {
        Ok(Strictness::Strict { bar_inverse, .. }) => {
            let mut s = format!("{name:<10} yes");
            if certificate {
                let _ = write!(
                    s,
                    "\n  bar inverse\n{}",
                    indent(&B::matrix(&bar_inverse).to_string(), 4)
                );
            }
            s
        }
        Ok(Strictness::NotStrict { witness, .. }) => format!("{name:<10} no ({witness})"),
        Err(e) => format!("{name:<10} error ({e})"),
    }
}

fn indent(text: &str, n: usize) -> String {
    let pad = " ".repeat(n);
    text.lines()
        .map(|l| format!("{pad}{l}"))
        .collect::<Vec<_>>()
        .join("\n")
}

fn validated<B: Backend>(cat: &B, raw: &RawCouple<B::Morphism>) -> Result<Couple<B>, Outcome> {
    validate_couple(cat, raw.alpha.clone(), raw.beta.clone(), raw.gamma.clone()).map_err(|e| {
        Outcome {
            code: EXIT_INVALID,
            report: String::new(),
            errors: format!("error: not a valid exact couple: {e}\n"),
        }
    })
}

pub fn check(path: &Path, opts: &Options) -> Outcome {
    match load(path) {
        Err(o) => o,
        Ok(Input {
            couple: LoadedCouple::Vect(raw),
            complex,
        }) => check_with(&Vect, &raw, opts, complex.as_ref()),
        Ok(Input {
            couple: LoadedCouple::Filt(raw),
            ..
        }) => check_with(&Filt, &raw, opts, None),
    }
}

fn check_with<B: Backend>(
    cat: &B,
    raw: &RawCouple<B::Morphism>,
    opts: &Options,
    fc: Option<&FilteredComplex>,
) -> Outcome {
    let mut out = String::new();
    let report = match check_exactness(cat, &raw.alpha, &raw.beta, &raw.gamma) {
        Ok(r) => r,
        Err(e) => {
            return Outcome {
                code: EXIT_INVALID,
                report: out,
                errors: format!("error: {e}\n"),
            }
        }
    };
    if let Some(fc) = fc {
        describe_complex(&mut out, fc);
    }
    let (d, e) = (cat.source(&raw.alpha), cat.target(&raw.beta));
    let _ = writeln!(out, "kind       {}", B::KIND);
    let _ = writeln!(out, "dim D      {}", cat.dim(&d));
    let _ = writeln!(out, "dim E      {}", cat.dim(&e));
    let mut oracle_ok = true;
    if let Some(fc) = fc {
        let (od, oe) = oracle::couple_dims(&fc.capped());
        oracle_ok = od == cat.dim(&d) && oe == cat.dim(&e);
        let _ = writeln!(
            out,
            "oracle     dim D {od}, dim E {oe}, match {}",
            yes(oracle_ok)
        );
    }
    let _ = writeln!(
        out,
        "\n{:<24} {:<10} {:<24} holds",
        "condition", "holds", "dual condition"
    );
    for c in &report.checks {
        let _ = writeln!(
            out,
            "{:<24} {:<10} {:<24} {}",
            c.subobject_relation,
            yes(c.subobject_iso.is_some()),
            c.quotient_relation,
            yes(c.quotient_iso.is_some())
        );
        if opts.certificate {
            if let Some(u) = &c.subobject_iso {
                let _ = writeln!(
                    out,
                    "  witness for {}\n{}",
                    c.subobject_relation,
                    indent(&B::matrix(u).to_string(), 4)
                );
            }
            if let Some(v) = &c.quotient_iso {
                let _ = writeln!(
                    out,
                    "  witness for {}\n{}",
                    c.quotient_relation,
                    indent(&B::matrix(v).to_string(), 4)
                );
            }
        }
    }
    let _ = writeln!(out, "\n{:<10} strict", "morphism");
    for (name, f) in [
        ("alpha", &raw.alpha),
        ("beta", &raw.beta),
        ("gamma", &raw.gamma),
    ] {
        let _ = writeln!(out, "{}", strictness_line(cat, name, f, opts.certificate));
    }
    let probes = opts.probe_config();
    let ker = semistable_kernel(cat, &cat.kernel(&raw.gamma), &probes).map(|v| v.label());
    let cok = semistable_cokernel(cat, &cat.cokernel(&raw.beta), &probes).map(|v| v.label());
    let _ = writeln!(out, "\n{:<10} semistable", "object");
    let _ = writeln!(out, "{:<10} {}", "ker gamma", ker.unwrap_or("error"));
    let _ = writeln!(out, "{:<10} {}", "cok beta", cok.unwrap_or("error"));
    let valid = report.is_exact();
    let _ = writeln!(out, "\n{}", if valid { "valid" } else { "invalid" });
    Outcome {
        code: if valid && oracle_ok {
            EXIT_OK
        } else {
            EXIT_INVALID
        },
        report: out,
        errors: if valid {
            String::new()
        } else {
            format!("error: exactness fails: {}\n", report.failures().join(", "))
        },
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SideArg {
    Left,
    Right,
    Both,
}

impl SideArg {
    fn sides(self) -> Sides {
        match self {
            SideArg::Left => Sides::Left,
            SideArg::Right => Sides::Right,
            SideArg::Both => Sides::Both,
        }
    }

    fn name(self) -> &'static str {
        match self {
            SideArg::Left => "left",
            SideArg::Right => "right",
            SideArg::Both => "both",
        }
    }
}

pub fn derive(
    path: &Path,
    side: SideArg,
    depth: usize,
    out_path: Option<&PathBuf>,
    opts: &Options,
) -> Outcome {
    match load(path) {
        Err(o) => o,
        Ok(Input {
            couple: LoadedCouple::Vect(raw),
            complex,
        }) => derive_with(&Vect, &raw, side, depth, out_path, opts, complex.as_ref()),
        Ok(Input {
            couple: LoadedCouple::Filt(raw),
            ..
        }) => derive_with(&Filt, &raw, side, depth, out_path, opts, None),
    }
}

/// `E` dimensions at each depth against the page totals of the capped complex.
fn oracle_rows<B: Backend>(cat: &B, tree: &Tree<B>, fc: &FilteredComplex) -> Vec<OracleDoc> {
    let cap = fc.capped();
    (0..=tree.depth)
        .map(|k| {
            let node_dims: Vec<usize> = tree.level(k).map(|n| cat.dim(n.couple.e())).collect();
            let page_total = oracle::page_total(&cap, k + 1);
            OracleDoc {
                depth: k,
                page: k + 1,
                page_total,
                matches: !node_dims.is_empty() && node_dims.iter().all(|&d| d == page_total),
                node_dims,
            }
        })
        .collect()
}

pub fn tree_doc<B: Backend>(cat: &B, tree: &Tree<B>, side: &str, with_couples: bool) -> TreeDoc {
    TreeDoc {
        format_version: FORMAT_VERSION,
        doc_type: "tree".into(),
        kind: B::KIND.into(),
        depth: tree.depth,
        sides: side.into(),
        complete: tree.is_complete(),
        nodes: tree
            .nodes
            .iter()
            .map(|n| NodeDoc {
                path: n.path.clone(),
                dim_d: cat.dim(n.couple.d()),
                dim_e: cat.dim(n.couple.e()),
                certificate: CertificateDoc {
                    alpha_strict: n.certificate.alpha_strict,
                    beta_strict: n.certificate.beta_strict,
                    gamma_strict: n.certificate.gamma_strict,
                    ker_gamma_semistable: n.certificate.ker_gamma_semistable.into(),
                    cok_beta_semistable: n.certificate.cok_beta_semistable.into(),
                    alpha_power_strict: n.certificate.alpha_power_strict.clone(),
                },
                omega: n.omega.as_ref().map(|o| OmegaDoc {
                    unique: o.unique,
                    monic: o.monic,
                    epic: o.epic,
                    iso: o.iso,
                }),
                failure: n.failure.clone(),
                couple: with_couples
                    .then(|| couple_doc(cat, n.couple.alpha(), n.couple.beta(), n.couple.gamma())),
            })
            .collect(),
        oracle: None,
    }
}

fn omega_label(o: &Option<OmegaDoc>) -> String {
    match o {
        None => "-".into(),
        Some(o) => {
            let mut parts = Vec::new();
            parts.push(if o.unique { "unique" } else { "non-unique" });
            if o.monic && o.epic {
                parts.push("bimorphism");
            } else {
                parts.push(if o.monic { "monic" } else { "not-monic" });
                parts.push(if o.epic { "epic" } else { "not-epic" });
            }
            parts.push(if o.iso { "iso" } else { "not-iso" });
            parts.join(" ")
        }
    }
}

pub fn render_tree(doc: &TreeDoc) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:<6} {:>5} {:>5}  {:<7} {:<10} {:<10} {:<8} {:<30} status",
        "node", "dim D", "dim E", "strict", "ker gamma", "cok beta", "alpha^k", "omega"
    );
    for n in &doc.nodes {
        let c = &n.certificate;
        let strict: String = [c.alpha_strict, c.beta_strict, c.gamma_strict]
            .iter()
            .map(|&b| if b { 'y' } else { 'n' })
            .collect();
        let powers: String = c
            .alpha_power_strict
            .iter()
            .map(|&b| if b { 'y' } else { 'n' })
            .collect();
        let _ = writeln!(
            out,
            "{:<6} {:>5} {:>5}  {:<7} {:<10} {:<10} {:<8} {:<30} {}",
            if n.path.is_empty() { "root" } else { &n.path },
            n.dim_d,
            n.dim_e,
            strict,
            c.ker_gamma_semistable,
            c.cok_beta_semistable,
            powers,
            omega_label(&n.omega),
            match &n.failure {
                None => "ok".to_string(),
                Some(f) => format!("failed: {f}"),
            }
        );
    }
    let _ = writeln!(
        out,
        "\nnodes {}, depth {}, sides {}, complete {}",
        doc.nodes.len(),
        doc.depth,
        doc.sides,
        yes(doc.complete)
    );
    if let Some(rows) = &doc.oracle {
        let _ = writeln!(
            out,
            "\n{:<6} {:<5} {:>10}  {:<24} match",
            "depth", "page", "page total", "node E dims"
        );
        for r in rows {
            let dims = r
                .node_dims
                .iter()
                .map(|d| d.to_string())
                .collect::<Vec<_>>()
                .join(" ");
            let _ = writeln!(
                out,
                "{:<6} {:<5} {:>10}  {:<24} {}",
                r.depth,
                format!("E{}", r.page),
                r.page_total,
                dims,
                yes(r.matches)
            );
        }
    }
    out
}

fn derive_with<B: Backend>(
    cat: &B,
    raw: &RawCouple<B::Morphism>,
    side: SideArg,
    depth: usize,
    out_path: Option<&PathBuf>,
    opts: &Options,
    fc: Option<&FilteredComplex>,
) -> Outcome {
    let couple = match validated(cat, raw) {
        Ok(c) => c,
        Err(o) => return o,
    };
    let config = IterateConfig {
        probes: opts.probe_config(),
        parallel: opts.parallel,
    };
    let tree = iterate(cat, &couple, depth, side.sides(), &config);
    let mut doc = tree_doc(cat, &tree, side.name(), opts.certificate);
    if let Some(fc) = fc {
        doc.oracle = Some(oracle_rows(cat, &tree, fc));
    }
    let mut report = String::new();
    if let Some(fc) = fc {
        describe_complex(&mut report, fc);
        report.push('\n');
    }
    report.push_str(&render_tree(&doc));
    let oracle_ok = doc
        .oracle
        .as_ref()
        .is_none_or(|rows| rows.iter().all(|r| r.matches));
    let mut errors = String::new();
    if let Some(p) = out_path {
        if let Err(e) = std::fs::write(p, to_canonical(&Document::Tree(doc.clone()))) {
            errors.push_str(&format!("error: {}: {e}\n", p.display()));
            return Outcome {
                code: EXIT_USAGE,
                report,
                errors,
            };
        }
        let _ = writeln!(report, "\nwrote {}", p.display());
    }
    let ok = doc.complete && oracle_ok;
    if !ok {
        errors.push_str("error: derivation tree incomplete or disagrees with the oracle\n");
    }
    Outcome {
        code: if ok { EXIT_OK } else { EXIT_INVALID },
        report,
        errors,
    }
}

pub fn cohomology(path: &Path, opts: &Options) -> Outcome {
    match load(path) {
        Err(o) => o,
        Ok(Input {
            couple: LoadedCouple::Vect(raw),
            complex,
        }) => cohomology_with(&Vect, &raw, opts, complex.as_ref()),
        Ok(Input {
            couple: LoadedCouple::Filt(raw),
            ..
        }) => cohomology_with(&Filt, &raw, opts, None),
    }
}

fn cohomology_with<B: Backend>(
    cat: &B,
    raw: &RawCouple<B::Morphism>,
    opts: &Options,
    fc: Option<&FilteredComplex>,
) -> Outcome {
    let couple = match validated(cat, raw) {
        Ok(c) => c,
        Err(o) => return o,
    };
    let fail = |e: String| Outcome {
        code: EXIT_INVALID,
        report: String::new(),
        errors: format!("error: {e}\n"),
    };
    let r = match derive_both(cat, &couple, &opts.probe_config()) {
        Ok(r) => r,
        Err(e) => return fail(e.to_string()),
    };
    let partial = match differential(cat, &couple) {
        Ok(p) => p,
        Err(e) => return fail(e.to_string()),
    };
    let m = B::matrix(&partial);
    let rank = m.rank();
    let kernel = m.cols() - rank;
    let (h_minus, h_plus) = (
        cat.dim(&r.cohomology.h_minus),
        cat.dim(&r.cohomology.h_plus),
    );
    let mut out = String::new();
    if let Some(fc) = fc {
        describe_complex(&mut out, fc);
    }
    let _ = writeln!(out, "kind             {}", B::KIND);
    let _ = writeln!(out, "dim E            {}", cat.dim(couple.e()));
    let _ = writeln!(out, "dim H-           {h_minus}");
    let _ = writeln!(out, "dim H+           {h_plus}");
    let _ = writeln!(out, "dim E1 left      {}", cat.dim(r.left.couple.e()));
    let _ = writeln!(out, "dim E1 right     {}", cat.dim(r.right.couple.e()));
    let _ = writeln!(out, "rank d           {rank}");
    let _ = writeln!(out, "dim ker d        {kernel}");
    let _ = writeln!(out, "ker d - rank d   {}", kernel - rank);
    let o = &r.omega;
    let _ = writeln!(
        out,
        "omega            {}",
        omega_label(&Some(OmegaDoc {
            unique: o.unique(),
            monic: o.monic,
            epic: o.epic,
            iso: o.iso,
        }))
    );
    let _ = writeln!(out, "ker d            {}", r.ker_partial_semistable.label());
    let _ = writeln!(out, "cok d            {}", r.cok_partial_semistable.label());
    if opts.certificate {
        let _ = writeln!(
            out,
            "\nomega\n{}",
            indent(&B::matrix(&o.omega).to_string(), 2)
        );
        if let Some(inv) = &o.inverse {
            let _ = writeln!(
                out,
                "omega inverse\n{}",
                indent(&B::matrix(inv).to_string(), 2)
            );
        }
    }
    // in the abelian model both cohomologies are the usual one
    let abelian_ok =
        !cat.guarantees().abelian || (h_minus == kernel - rank && h_plus == kernel - rank);
    if !abelian_ok {
        return Outcome {
            code: EXIT_INVALID,
            report: out,
            errors: "error: cohomology dimensions disagree with rank-nullity\n".into(),
        };
    }
    Outcome {
        code: EXIT_OK,
        report: out,
        errors: String::new(),
    }
}

/// Document for a couple, used to write fixtures.
pub fn couple_document<B: Backend>(cat: &B, c: &Couple<B>) -> CoupleDoc {
    couple_doc(cat, c.alpha(), c.beta(), c.gamma())
}
