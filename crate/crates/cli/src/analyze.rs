//! Runs one experiment and assembles its report.

use std::sync::Arc;

use cantorchain_core::bs::{
    appendix_normality, bs_chain, closed_form_tower, k_table, level_data, stability_certificate,
    BsParams, DudkinTriple, KTable, LevelData,
};
use cantorchain_core::chain::{
    build_chain_from_path, core_table, discriminant_tower, stability_verdict, Certificate,
    DiscriminantTower,
};
use cantorchain_core::odometer::odometer;
use cantorchain_core::perm::{wreath_order, GeneratedGroup, GroupElement, Portrait};
use cantorchain_core::tree::{PathPrefix, TreeSignature, VertexAddress};
use cantorchain_core::wreath::{
    abelianization_check, finite_index_wildness_evidence, level_kernel, structural_tower,
    truncated_level_groups, wild_certificate, WildnessEvidence, WreathChainSpec,
};
use num_bigint::BigUint;

use crate::config::{ExperimentConfig, Family};
use crate::error::CliError;
use crate::report::{BsSection, NormalityRow, Report, ToolInfo, TowerTables, WreathSection};

/// Groups up to this order also get their abelianization reported.
const ABELIANIZATION_LIMIT: usize = 40_000;

fn fits(order: &BigUint, cap: usize) -> bool {
    *order <= BigUint::from(cap)
}

fn enumerated_tower(
    group: &GeneratedGroup<Portrait>,
    path: &PathPrefix,
) -> Result<DiscriminantTower, CliError> {
    let chain = build_chain_from_path(group, path)?;
    let table = core_table(&chain)?;
    Ok(discriminant_tower(&chain, &table)?)
}

fn finish(
    config: &ExperimentConfig,
    tower: DiscriminantTower,
    method: String,
    certificates: Vec<Certificate>,
) -> Report {
    let verdict = stability_verdict(&tower, &certificates);
    Report {
        tool: ToolInfo::default(),
        config: config.clone(),
        family: config.family.id(),
        horizon: tower.horizon,
        method,
        tower: TowerTables::from(&tower),
        bs: None,
        wreath: None,
        evidence: None,
        witnesses: Vec::new(),
        verdict,
    }
}

pub fn analyze(config: &ExperimentConfig) -> Result<Report, CliError> {
    config.validate()?;
    let cap = config.enumeration_cap();
    let horizon = config.horizon;
    match &config.family {
        Family::Wreath { d } => {
            let sig = Arc::new(TreeSignature::constant(*d, horizon)?);
            wreath(config, sig, cap)
        }
        Family::Odometer { d } => {
            let sig = Arc::new(TreeSignature::constant(*d, horizon)?);
            let a = odometer(&sig);
            let group = GeneratedGroup::with_cap(a.identity_like(), vec![a], cap);
            let path = PathPrefix::leftmost(sig);
            generic(config, group, path)
        }
        Family::Custom {
            degrees,
            generators,
            base_path,
        } => {
            let sig = Arc::new(TreeSignature::new(degrees.clone())?);
            let gens = generators
                .iter()
                .map(|g| Portrait::from_json(Arc::clone(&sig), g))
                .collect::<Result<Vec<_>, _>>()?;
            let group = GeneratedGroup::with_cap(Portrait::identity(Arc::clone(&sig)), gens, cap);
            let path = match base_path {
                Some(word) => PathPrefix::new(Arc::clone(&sig), VertexAddress::new(word.clone()))?,
                None => PathPrefix::leftmost(sig),
            };
            generic(config, group, path)
        }
        Family::Bs { q, d } => bs(config, BsParams::new(*q, *d, horizon)?, cap),
    }
}

fn evidence_for(group: &GeneratedGroup<Portrait>) -> Result<WildnessEvidence, CliError> {
    Ok(finite_index_wildness_evidence(&truncated_level_groups(
        group,
    )?)?)
}

fn generic(
    config: &ExperimentConfig,
    group: GeneratedGroup<Portrait>,
    path: PathPrefix,
) -> Result<Report, CliError> {
    let tower = enumerated_tower(&group, &path)?;
    let evidence = evidence_for(&group)?;
    let mut report = finish(config, tower, "enumeration".into(), Vec::new());
    report.witnesses = evidence.witness.clone().into_iter().collect();
    report.evidence = Some(evidence);
    Ok(report)
}

fn wreath(
    config: &ExperimentConfig,
    sig: Arc<TreeSignature>,
    cap: usize,
) -> Result<Report, CliError> {
    let spec = WreathChainSpec::new(PathPrefix::leftmost(Arc::clone(&sig)), cap)?;
    let closed = structural_tower(&sig)?;
    let total = spec.ambient_order();
    let enumerable = fits(&total, cap);
    let method = if enumerable {
        let enumerated = enumerated_tower(spec.ambient(), spec.base())?;
        if enumerated != closed {
            return Err(CliError::OracleMismatch(
                "enumerated wreath tower differs from the structural formula".into(),
            ));
        }
        "closed form, cross-checked by enumeration"
    } else {
        "closed form"
    };
    let (certificate, witnesses) = if sig.horizon() >= 2 {
        let (c, w) = wild_certificate(&spec)?;
        (Some(c), w)
    } else {
        (None, Vec::new())
    };
    let level_kernel_orders = (0..=sig.horizon())
        .map(|n| level_kernel(&spec, n).map(|k| k.order.to_string()))
        .collect::<Result<Vec<_>, _>>()?;
    let mut abelianization = Vec::new();
    for n in 1..=sig.horizon() {
        if !fits(
            &wreath_order(&sig.degrees()[..n]),
            ABELIANIZATION_LIMIT.min(cap),
        ) {
            break;
        }
        abelianization.push(abelianization_check(&sig, n, cap)?);
    }
    let evidence = if enumerable {
        Some(evidence_for(spec.ambient())?)
    } else {
        None
    };
    let mut report = finish(
        config,
        closed,
        method.into(),
        certificate.iter().cloned().collect(),
    );
    report.wreath = Some(WreathSection {
        ambient_order: total.to_string(),
        level_kernel_orders,
        abelianization,
        certificate,
    });
    report.witnesses = witnesses.iter().map(|w| w.record()).collect();
    report.evidence = evidence;
    Ok(report)
}

/// `C_n^m` and `G_n` tested for normality in `G_m`, where the moduli fit a
/// machine word.
fn normality_rows(
    params: &BsParams,
    levels: &LevelData,
    k: &KTable,
) -> Result<Vec<NormalityRow>, CliError> {
    let word = |x: &BigUint| -> Option<u64> { x.try_into().ok() };
    let mut rows = Vec::new();
    for n in 1..=levels.horizon() {
        let Some(ell) = word(&levels.modulus[n]) else {
            break;
        };
        for m in 0..n {
            let r = if m == 0 {
                Some(1)
            } else {
                word(&levels.modulus[m])
            };
            let (Some(r), Some(kmn)) = (r, word(k.get(m, n))) else {
                continue;
            };
            for (name, power) in [("core", kmn), ("level", 1)] {
                let sub = DudkinTriple::new(ell, power, 0, params.q())?;
                rows.push(NormalityRow {
                    m,
                    n,
                    subgroup: name,
                    normal_in_g_m: appendix_normality((r, 1), &sub, params.q())?,
                });
            }
        }
    }
    Ok(rows)
}

fn bs(config: &ExperimentConfig, params: BsParams, cap: usize) -> Result<Report, CliError> {
    let levels = level_data(&params)?;
    let k = k_table(&params, &levels)?;
    let closed = closed_form_tower(&levels, &k)?;
    let method = if fits(&levels.quotient_order(params.horizon()), cap) {
        let chain = bs_chain(&params, cap)?;
        let table = core_table(&chain)?;
        let enumerated = discriminant_tower(&chain, &table)?;
        if enumerated != closed {
            return Err(CliError::OracleMismatch(
                "enumerated cores in H_N differ from the closed form".into(),
            ));
        }
        "closed form, cross-checked by enumeration"
    } else {
        "closed form"
    };
    let certificate = stability_certificate(&params)?;
    let section = BsSection {
        q: params.q(),
        d: params.d(),
        odd_prime_regime: params.odd_prime_regime(),
        s: BsSection::decimal(&levels.s),
        c: BsSection::decimal(&levels.c),
        modulus: BsSection::decimal(&levels.modulus),
        k: k.rows.iter().map(|r| BsSection::decimal(r)).collect(),
        quotient_orders: (0..=params.horizon())
            .map(|n| levels.quotient_order(n).to_string())
            .collect(),
        normality: normality_rows(&params, &levels, &k)?,
        certificate: Some(certificate.clone()),
    };
    let mut report = finish(config, closed, method.into(), vec![certificate]);
    report.bs = Some(section);
    Ok(report)
}
