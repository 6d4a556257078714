//! The five subcommands. Each returns an [`Outcome`] whose certificates and
//! extra data go into the bundle, and writes its tables as it goes.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde_json::{json, Value};
use transdeg::certifier::{
    certify_cone_condition, certify_discordance, certify_discordance_for, certify_dyndeg, certify_galois_sd,
    certify_irreducible, certify_leading_pair, certify_no_real_power, certify_resonance_free, Certificate,
    CertificateKind, ConeOptions, PrimeOrder, Verdict,
};
use transdeg::degree::degree_sequence;
use transdeg::dioph::{
    convergents, irregular_indices, monotonicity_violations, omega_approximants, residual_terms, sparsity_row, LabSetup,
    DEFAULT_SKIP,
};
use transdeg::factory::{certify_candidate, companion_is_sl, construct_polynomial, root_shape};
use transdeg::oracle::oracle_degree;
use transdeg::solver::SolveOptions;
use transdeg::spectral::spectral_data;
use transdeg::toric::canonical_sets;
use transdeg::ModelError;

use crate::config::{parse_polynomial, RunConfig};
use crate::exit::{CliError, Exit};
use crate::output::{yes_no, Output};

/// Result of a subcommand: its exit code and what goes into the bundle.
pub struct Outcome {
    pub exit: Exit,
    pub certificates: Vec<Certificate>,
    pub extra: Value,
}

/// `Ok` when everything is proved, otherwise refuted before inconclusive.
fn verdict_exit(certs: &[Certificate]) -> Exit {
    certs.iter().fold(Exit::Ok, |acc, c| {
        acc.worst(match c.verdict {
            Verdict::Proved => Exit::Ok,
            Verdict::Refuted => Exit::Refuted,
            Verdict::Inconclusive => Exit::Inconclusive,
        })
    })
}

/// An inconclusive placeholder recording why a certificate could not be attempted.
fn not_attempted(kind: CertificateKind, reason: &ModelError) -> Certificate {
    Certificate::new(kind, Verdict::Inconclusive, json!({ "reason": reason.to_string() }), json!({}))
}

/// Log2 of a positive integer, for ratios of huge degrees.
fn log2_big(x: &BigInt) -> f64 {
    let shift = x.bits().saturating_sub(60);
    (x >> shift).to_f64().unwrap_or(f64::NAN).log2() + shift as f64
}

pub fn cmd_degrees(config: &RunConfig, out: &Output, oracle_max: usize, trials: usize) -> Result<Outcome, CliError> {
    let a = config.target()?;
    let support = canonical_sets(config.dim)?;
    let n_max = config.n_max.unwrap_or(10);
    let seq = degree_sequence(&a, &support, n_max)?;
    let oracle_n = oracle_max.min(n_max);
    let report = if oracle_n > 0 { Some(oracle_degree(&a, oracle_n, trials.max(1), config.seed, None)?) } else { None };

    let mut rows = Vec::with_capacity(n_max + 1);
    let mut mismatches = Vec::new();
    for n in 0..=n_max {
        let oracle = report.as_ref().and_then(|r| r.degrees.get(n).copied());
        if let Some(o) = oracle {
            if BigInt::from(o) != seq.deg_f[n] {
                mismatches.push(n);
            }
        }
        rows.push(vec![
            n.to_string(),
            seq.deg_f[n].to_string(),
            seq.deg_hf[n].to_string(),
            seq.psi_ap[n].to_string(),
            seq.psi_av[n].to_string(),
            oracle.map_or("-".into(), |o| o.to_string()),
        ]);
    }
    let header = ["n", "deg_f", "deg_h_f", "psi_p", "psi_v", "oracle"];
    out.table("degrees.tsv", &header, &rows, true)?;
    if let Some(r) = &report {
        out.json("oracle.json", r)?;
    }
    let exit = if mismatches.is_empty() { Exit::Ok } else { Exit::CrossCheck };
    if !mismatches.is_empty() {
        eprintln!("oracle disagrees with the exact degrees at n = {mismatches:?}");
    }
    Ok(Outcome {
        exit,
        certificates: Vec::new(),
        extra: json!({ "oracle_checked_to": oracle_n, "oracle_mismatches": mismatches }),
    })
}

pub fn cmd_certify(config: &RunConfig) -> Result<Outcome, CliError> {
    let m = config.conjugated()?;
    let target = config.target()?;
    let support = canonical_sets(config.dim)?;
    let p = m.char_poly();
    let order = PrimeOrder::Ascending;
    let attempt = |kind: CertificateKind, r: Result<Certificate, ModelError>| r.unwrap_or_else(|e| not_attempted(kind, &e));

    let mut certs = vec![attempt(CertificateKind::Irreducible, certify_irreducible(&p, config.prime_budget, order))];
    let galois = attempt(CertificateKind::GaloisSd, certify_galois_sd(&p, config.prime_budget, order));
    certs.push(galois.clone());
    match spectral_data(&m, -128) {
        Ok(sp) => {
            certs.push(certify_leading_pair(&sp));
            let nrp = certify_no_real_power(&p, &sp);
            let resonance = certify_resonance_free(&p, &sp, &galois, nrp.as_ref().ok());
            certs.push(attempt(CertificateKind::NoRealPower, nrp));
            certs.push(attempt(CertificateKind::ResonanceFree, resonance));
            let discordance = match (&config.matrix, &config.conjugator) {
                (Some(base), Some(y)) => certify_discordance_for(base, y, &support),
                _ => certify_discordance(&sp, &support),
            };
            certs.push(attempt(CertificateKind::Discordance, discordance.map(|(c, _)| c)));
        }
        Err(e) => {
            for kind in [
                CertificateKind::LeadingPair,
                CertificateKind::NoRealPower,
                CertificateKind::ResonanceFree,
                CertificateKind::Discordance,
            ] {
                certs.push(not_attempted(kind, &e));
            }
        }
    }
    let options = ConeOptions {
        target_bound: config.target_bound.clone(),
        prime_budget: config.prime_budget,
        jobs: config.jobs,
        ..ConeOptions::default()
    };
    let mut statuses = Vec::new();
    match certify_cone_condition(&target, &support, &options) {
        Ok((c, s)) => {
            certs.push(c);
            statuses = s;
        }
        Err(e) => certs.push(not_attempted(CertificateKind::ConeCondition, &e)),
    }
    for c in &certs {
        println!("{:?}\t{:?}", c.kind, c.verdict);
    }
    Ok(Outcome {
        exit: verdict_exit(&certs),
        certificates: certs,
        extra: json!({ "characteristic_polynomial": p.to_string(), "recurrences": statuses }),
    })
}

pub fn cmd_dyndeg(config: &RunConfig, out: &Output) -> Result<Outcome, CliError> {
    let m = config.conjugated()?;
    let support = canonical_sets(config.dim)?;
    let options = SolveOptions { tolerance: config.tolerance, ..SolveOptions::default() };
    let (cert, result) = certify_dyndeg(&m, config.power, &support, &options)?;
    let mut exit = verdict_exit(std::slice::from_ref(&cert));
    let mut extra = json!({});
    if let Some(r) = &result {
        let lambda = r.lambda_enclosure();
        println!("lambda\t{:.12}\t(width {:.2e})", lambda.to_f64(), lambda.width().to_f64());
        println!("lambda_enclosure\t[{}, {}]", r.lambda_lo, r.lambda_hi);
        println!("terms\t{}", r.n_terms_used);
        // Growth ratio of the exact degrees as an independent check.
        let n = config.n_max.unwrap_or(25).max(2);
        let seq = degree_sequence(&config.target()?, &support, n)?;
        let ratio = (log2_big(&seq.deg_f[n]) - log2_big(&seq.deg_f[n - 1])).exp2();
        let gap = (ratio / lambda.to_f64() - 1.0).abs();
        println!("growth_ratio\t{ratio:.10}\t(n = {n}, relative gap {gap:.2e})");
        if n >= 20 && gap > 0.01 {
            eprintln!("growth ratio and dynamical degree differ by more than 1%");
            exit = exit.worst(Exit::CrossCheck);
        }
        out.table(
            "dyndeg.tsv",
            &["lambda_lo", "lambda_hi", "terms", "growth_ratio", "ratio_index"],
            &[vec![r.lambda_lo.clone(), r.lambda_hi.clone(), r.n_terms_used.to_string(), format!("{ratio:.12}"), n.to_string()]],
            false,
        )?;
        extra = json!({ "result": r, "growth_ratio": ratio, "ratio_index": n });
    }
    Ok(Outcome { exit, certificates: vec![cert], extra })
}

pub fn cmd_construct(config: &RunConfig, candidate: Option<&str>) -> Result<Outcome, CliError> {
    match candidate {
        Some(text) => {
            let p = parse_polynomial(text)?;
            if !companion_is_sl(&p) {
                let det = transdeg_core::IntegerMatrix::companion(&p).map(|c| c.det().to_string()).unwrap_or_default();
                return Err(CliError::new(Exit::Validation, format!("companion matrix of {p} has determinant {det}, not 1")));
            }
            let certs = certify_candidate(&p, PrimeOrder::Shuffled(config.seed))?;
            let shape = root_shape(&p)?;
            println!("candidate\t{p}");
            println!("admissible_shape\t{}", yes_no(shape.is_admissible(p.deg())));
            for c in &certs {
                println!("{:?}\t{:?}", c.kind, c.verdict);
            }
            Ok(Outcome { exit: verdict_exit(&certs), certificates: certs, extra: json!({ "candidate": p.to_string(), "shape": shape }) })
        }
        None => {
            let result = construct_polynomial(config.dim, config.seed)?;
            println!("polynomial\t{}", result.polynomial);
            println!("matrix\t{}", result.matrix);
            println!("escalation_steps\t{}", result.trace.escalation_steps);
            let exit = verdict_exit(&result.certificates);
            let certs = result.certificates.clone();
            Ok(Outcome { exit, certificates: certs, extra: json!({ "factory": result }) })
        }
    }
}

pub fn cmd_diagnose(config: &RunConfig, out: &Output, scale: &BigRational, constant_selector: bool) -> Result<Outcome, CliError> {
    let m = config.conjugated()?;
    let support = canonical_sets(config.dim)?;
    let mut setup = LabSetup::new(spectral_data(&m, -128)?, &support, scale.clone(), config.power)?;
    if constant_selector {
        // Freeze the selector at its first piece: a control with nothing to cross.
        setup.gamma.breakpoints.clear();
        setup.gamma.selectors.truncate(1);
        setup.gamma.values.truncate(1);
    }
    let count = config.n_max.unwrap_or(10).max(2);
    let list = setup.escalate(|s| convergents(&s.angle()?, count))?;
    let dens: Vec<u64> = list
        .denominators()
        .iter()
        .map(|n| n.to_u64().ok_or_else(|| CliError::new(Exit::Precision, "convergent denominator exceeds 64 bits")))
        .collect::<Result<_, _>>()?;

    let rows: Vec<Vec<String>> = list
        .convergents
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let second = list.certifies_second_kind(i).map_or("-".into(), |b| yes_no(b).to_string());
            vec![i.to_string(), c.m.to_string(), c.n.to_string(), yes_no(list.certifies_first_kind(i)).into(), second]
        })
        .collect();
    out.table("convergents.tsv", &["i", "m", "n", "first_kind", "second_kind"], &rows, false)?;

    let usable: Vec<u64> = dens.iter().copied().skip(DEFAULT_SKIP).collect();
    let mut sparsity = Vec::new();
    let mut irregular = Vec::new();
    let mut violations = 0;
    for &n in &usable {
        for c in [2u64, 3] {
            let row = setup.escalate(|s| sparsity_row(&s.gamma, &s.angle()?, n, c))?;
            violations += usize::from(!row.within_bound());
            sparsity.push(vec![n.to_string(), c.to_string(), row.count.to_string(), row.bound.to_string(), yes_no(row.ambiguous).into()]);
        }
        for idx in setup.escalate(|s| irregular_indices(&s.gamma, &s.angle()?, n, n + 1, 3 * n))? {
            irregular.push(vec![n.to_string(), idx.j.to_string(), idx.crossing.to_string(), yes_no(idx.ambiguous).into()]);
        }
    }
    out.table("sparsity.tsv", &["n", "c", "count", "bound", "ambiguous"], &sparsity, false)?;
    out.table("irregular.tsv", &["n", "j", "crossing", "ambiguous"], &irregular, false)?;

    let mut omega_rows = Vec::new();
    let mut distances = Vec::new();
    if !setup.gamma.is_constant() {
        for &n in dens.iter().filter(|&&n| n > 1 && n % 2 == 1) {
            let cmp = omega_approximants(&setup, n, 0)?;
            distances.push(cmp.log2_distance() as f64);
            omega_rows.push(vec![
                n.to_string(),
                "0".into(),
                cmp.first_difference.map_or("-".into(), |f| f.to_string()),
                cmp.log2_distance().to_string(),
                yes_no(cmp.strictly_above()).into(),
                yes_no(cmp.consistent()).into(),
            ]);
        }
    }
    out.table("omega.tsv", &["n", "b", "first_difference", "log2_distance", "strictly_above", "consistent"], &omega_rows, false)?;

    let mut residual_rows = Vec::new();
    if let Some(&n) = usable.first() {
        for t in setup.escalate(|s| residual_terms(s, n, 3.0 * n as f64))? {
            let alpha: Vec<String> = t.alpha.iter().map(|a| a.to_string()).collect();
            let (re, im) = t.zeta.to_f64();
            residual_rows.push(vec![
                n.to_string(),
                alpha.join(","),
                t.irregular_component.0.to_string(),
                format!("{:.6}", t.norm),
                format!("{re:.6e}"),
                format!("{im:.6e}"),
            ]);
        }
    }
    out.table("residual.tsv", &["n", "alpha", "component", "norm", "zeta_re", "zeta_im"], &residual_rows, false)?;

    let digits: Vec<String> = list.digits.iter().map(|a| a.to_string()).collect();
    println!("digits\t{}", digits.join(" "));
    println!("sparsity_violations\t{violations}");
    println!("irregular_indices\t{}", irregular.len());
    println!("omega_monotonicity_violations\t{}", monotonicity_violations(&distances));
    Ok(Outcome {
        exit: Exit::Ok,
        certificates: Vec::new(),
        extra: json!({ "digits": digits, "sparsity_violations": violations, "constant_selector": constant_selector }),
    })
}

