//! The four pipeline commands: generate, train, evaluate, audit.

use std::collections::BTreeMap;
use std::path::Path;

use crate::domain::{MinMaxScaler, Mission, Phase, SampleKey, StressVector};
use crate::error::{Error, Result};
use crate::io::dataset::{load_dataset, write_dataset, Dataset, LabelRow};
use crate::io::model::{write_curves, PipelineModel, CURVES_FILE, MODEL_FILE};
use crate::io::report::{
    AuditReport, BatteryRow, GroupedLifeMre, PredictionReport, SampleResult, StressComponentEval,
    AUDIT_FILE, REPORT_FILE,
};
use crate::io::RunConfig;
use crate::oracle::generate_fleet;
use crate::phase1::{fit_flight_model, fit_ground_model, FlightSample, GroundSample};
use crate::phase2::{
    build_damage_features, fit_damage_models, predict_per_flight_damage, DamageSample, GagFeatures,
};
use crate::phase3::{accumulate_damage, miner_life, LifePrediction};
use crate::stats::{
    ad_2sample, bootstrap_p95_interval, chi2_2sample, coverage_check, error_summary, grouped_mre,
    ks_2sample, proximity_audit, relative_error, split_assign, Split, SplitAssignment,
};

/// Generate the synthetic dataset into `out_dir`.
pub fn cmd_generate(config: &RunConfig, out_dir: &Path) -> Result<()> {
    config.validate()?;
    let world = generate_fleet(&config.oracle)?;
    write_dataset(&world, out_dir)
}

/// Predicted stress vector per segment of a mission at one PSE: quadratic
/// fit for ground segments, the shared MLP for flight segments.
fn predict_segment_stresses(
    model: &PipelineModel,
    mission: &Mission,
    pse: u8,
) -> Result<Vec<StressVector>> {
    mission
        .segments
        .iter()
        .map(|seg| match seg.phase() {
            Phase::Ground => model.ground.predict_stress(pse, seg.params.fw),
            Phase::Flight => model.flight.predict(pse, &seg.params),
        })
        .collect()
}

/// End-to-end prediction for one labeled sample.
fn predict_sample(
    model: &PipelineModel,
    mission: &Mission,
    key: &SampleKey,
) -> Result<LifePrediction> {
    let stresses = predict_segment_stresses(model, mission, key.pse)?;
    let (gag_f, gm_f) = build_damage_features(mission, &stresses, key.kt)?;
    let (d_gag_bar, d_gm_bar) = predict_per_flight_damage(&model.gag, &model.gm, &gag_f, &gm_f)?;
    let n = mission.n_flights as f64;
    let d_gag = accumulate_damage(d_gag_bar, n)?;
    let d_gm = accumulate_damage(d_gm_bar, n)?;
    Ok(LifePrediction {
        key: key.clone(),
        n_flights: n,
        d_gag,
        d_gm,
        life_n: miner_life(n, d_gag, d_gm)?,
    })
}

fn labels_in_split<'d>(
    ds: &'d Dataset,
    split: &SplitAssignment,
    which: Split,
) -> Result<Vec<&'d LabelRow>> {
    let mut rows = Vec::new();
    for row in &ds.labels {
        if split.classify(row.key.pse, &row.key.mission_id)? == which {
            rows.push(row);
        }
    }
    Ok(rows)
}

/// Damage-model samples (features from phase-I *predicted* stresses,
/// targets from the labels) for every label row in one split.
fn damage_samples(
    ds: &Dataset,
    model: &PipelineModel,
    split: &SplitAssignment,
    which: Split,
) -> Result<Vec<DamageSample>> {
    let mut samples = Vec::new();
    for row in labels_in_split(ds, split, which)? {
        let mission = ds.mission(&row.key.mission_id)?;
        let stresses = predict_segment_stresses(model, mission, row.key.pse)?;
        let (gag, gm) = build_damage_features(mission, &stresses, row.key.kt)?;
        let n = row.n_flights as f64;
        samples.push(DamageSample {
            gag,
            gm,
            d_gag_bar: row.d_gag / n,
            d_gm_bar: row.d_gm / n,
        });
    }
    Ok(samples)
}

/// Train the full pipeline on a generated dataset; writes model.json and
/// curves.csv into `out_dir`.
pub fn cmd_train(dataset_dir: &Path, config: &RunConfig, out_dir: &Path) -> Result<PipelineModel> {
    config.validate()?;
    let ds = load_dataset(dataset_dir)?;
    let split = split_assign(&ds.pses(), &ds.mission_ids(), config.split_seed)?;

    // phase I training data, per split
    let mut ground_train: Vec<GroundSample> = Vec::new();
    let mut flight_train: Vec<FlightSample> = Vec::new();
    let mut flight_val: Vec<FlightSample> = Vec::new();
    for mission in &ds.missions {
        for pse in ds.pses() {
            let which = split.classify(pse, &mission.id)?;
            let stresses = ds.true_stresses(&mission.id, pse)?;
            for (seg, stress) in mission.segments.iter().zip(stresses) {
                match (seg.phase(), which) {
                    (Phase::Ground, Split::Train) => {
                        ground_train.push((pse, seg.params.fw, stress.one_g));
                    }
                    (Phase::Flight, Split::Train) => flight_train.push(FlightSample {
                        pse,
                        params: seg.params,
                        stress: *stress,
                    }),
                    (Phase::Flight, Split::Val) => flight_val.push(FlightSample {
                        pse,
                        params: seg.params,
                        stress: *stress,
                    }),
                    _ => {}
                }
            }
        }
    }

    let ground = fit_ground_model(&ground_train)?;
    let (flight, flight_curves) = fit_flight_model(&flight_train, &flight_val, &config.flight_train)?;

    // phase II consumes phase-I predictions, so assemble a provisional
    // model to run the stress path
    let provisional = PipelineModel {
        split: split.clone(),
        ground,
        flight,
        gag: placeholder_damage_model(crate::phase2::DamageKind::Gag),
        gm: placeholder_damage_model(crate::phase2::DamageKind::Gm),
        flight_train: config.flight_train.clone(),
        gag_train: config.gag_train.clone(),
        gm_train: config.gm_train.clone(),
    };
    let train_samples = damage_samples(&ds, &provisional, &split, Split::Train)?;
    let val_samples = damage_samples(&ds, &provisional, &split, Split::Val)?;
    let ((gag, gag_curves), (gm, gm_curves)) = fit_damage_models(
        &train_samples,
        &val_samples,
        &config.gag_train,
        &config.gm_train,
    )?;

    let model = PipelineModel {
        gag,
        gm,
        ..provisional
    };
    std::fs::create_dir_all(out_dir)?;
    model.save(&out_dir.join(MODEL_FILE))?;
    write_curves(&out_dir.join(CURVES_FILE), &flight_curves, &gag_curves, &gm_curves)?;
    Ok(model)
}

/// A structurally valid stand-in used while phase II is not yet fitted.
fn placeholder_damage_model(kind: crate::phase2::DamageKind) -> crate::phase2::DamageModel {
    use crate::nn::{Activation, Mlp, MlpSpec};
    let input_dim = match kind {
        crate::phase2::DamageKind::Gag => 9,
        crate::phase2::DamageKind::Gm => 7,
    };
    crate::phase2::DamageModel {
        kind,
        mlp: Mlp::init(
            MlpSpec {
                input_dim,
                hidden: vec![1],
                output_dim: 1,
                activation: Activation::Tanh,
                dropout_rate: 0.0,
            },
            0,
        )
        .unwrap(),
        input_scaler: MinMaxScaler {
            mins: vec![0.0; input_dim],
            maxs: vec![1.0; input_dim],
        },
        output_scaler: MinMaxScaler {
            mins: vec![0.0],
            maxs: vec![1.0],
        },
    }
}

fn kt_key(kt: f64) -> String {
    format!("{kt}")
}

/// Evaluate the trained pipeline on the test split; writes report.json and
/// the plot CSVs into `out_dir`.
pub fn cmd_evaluate(
    dataset_dir: &Path,
    model_path: &Path,
    config: &RunConfig,
    out_dir: &Path,
) -> Result<PredictionReport> {
    config.validate()?;
    let ds = load_dataset(dataset_dir)?;
    let model = PipelineModel::load(model_path)?;
    check_split_matches(&ds, &model)?;
    let split = &model.split;

    let mut rows = Vec::new();
    for label in labels_in_split(&ds, split, Split::Test)? {
        let mission = ds.mission(&label.key.mission_id)?;
        let pred = predict_sample(&model, mission, &label.key)?;
        rows.push(SampleResult {
            mission_id: label.key.mission_id.clone(),
            pse: label.key.pse,
            kt: label.key.kt,
            n_flights: label.n_flights as f64,
            true_d_gag: label.d_gag,
            pred_d_gag: pred.d_gag,
            err_d_gag_pct: relative_error(pred.d_gag, label.d_gag)?,
            true_d_gm: label.d_gm,
            pred_d_gm: pred.d_gm,
            err_d_gm_pct: relative_error(pred.d_gm, label.d_gm)?,
            true_life: label.life_n,
            pred_life: pred.life_n,
            err_life_pct: relative_error(pred.life_n, label.life_n)?,
        });
    }
    if rows.is_empty() {
        return Err(Error::data("test split is empty"));
    }

    let life_errors: Vec<f64> = rows.iter().map(|r| r.err_life_pct).collect();
    let region = config.region_of_interest;
    let region_errors: Vec<f64> = rows
        .iter()
        .filter(|r| r.true_life > region.0 && r.true_life < region.1)
        .map(|r| r.err_life_pct)
        .collect();

    let grouped_life_mre = GroupedLifeMre {
        by_pse: grouped_mre(
            &rows.iter().map(|r| (r.pse, r.err_life_pct)).collect::<Vec<_>>(),
        ),
        by_mission: grouped_mre(
            &rows
                .iter()
                .map(|r| (r.mission_id.clone(), r.err_life_pct))
                .collect::<Vec<_>>(),
        ),
        by_kt: grouped_mre(
            &rows
                .iter()
                .map(|r| (kt_key(r.kt), r.err_life_pct))
                .collect::<Vec<_>>(),
        ),
    };

    // phase-I stress errors on the test flight segments, per component,
    // and the ground-polynomial errors on the test taxi segments
    let mut component_errors: BTreeMap<String, Vec<(String, f64)>> = BTreeMap::new();
    let mut ground_errors: Vec<f64> = Vec::new();
    for mission in &ds.missions {
        for pse in ds.pses() {
            if split.classify(pse, &mission.id)? != Split::Test {
                continue;
            }
            let truths = ds.true_stresses(&mission.id, pse)?;
            for (seg, truth) in mission.segments.iter().zip(truths) {
                match seg.phase() {
                    Phase::Flight => {
                        let pred = model.flight.predict(pse, &seg.params)?;
                        for (name, (p, t)) in StressVector::NAMES
                            .iter()
                            .zip(pred.to_array().into_iter().zip(truth.to_array()))
                        {
                            component_errors
                                .entry(name.to_string())
                                .or_default()
                                .push((mission.id.clone(), relative_error(p, t)?));
                        }
                    }
                    Phase::Ground => {
                        let pred = model.ground.predict(pse, seg.params.fw)?;
                        ground_errors.push(relative_error(pred, truth.one_g)?);
                    }
                }
            }
        }
    }
    let stress_eval: BTreeMap<String, StressComponentEval> = component_errors
        .into_iter()
        .map(|(name, pairs)| {
            let errors: Vec<f64> = pairs.iter().map(|(_, e)| *e).collect();
            Ok((
                name,
                StressComponentEval {
                    summary: error_summary(&errors)?,
                    mre_by_mission: grouped_mre(&pairs),
                },
            ))
        })
        .collect::<Result<_>>()?;

    let report = PredictionReport {
        region_of_interest: region,
        life_summary_full: error_summary(&life_errors)?,
        life_summary_region: if region_errors.is_empty() {
            None
        } else {
            Some(error_summary(&region_errors)?)
        },
        d_gag_summary: error_summary(&rows.iter().map(|r| r.err_d_gag_pct).collect::<Vec<_>>())?,
        d_gm_summary: error_summary(&rows.iter().map(|r| r.err_d_gm_pct).collect::<Vec<_>>())?,
        grouped_life_mre,
        stress_eval,
        ground_summary: error_summary(&ground_errors)?,
        rows,
    };
    std::fs::create_dir_all(out_dir)?;
    report.save(&out_dir.join(REPORT_FILE))?;
    report.write_plot_csvs(out_dir)?;
    Ok(report)
}

fn check_split_matches(ds: &Dataset, model: &PipelineModel) -> Result<()> {
    let expected: Vec<u8> = ds.pses();
    let got: Vec<u8> = model.split.per_pse.keys().copied().collect();
    if expected != got {
        return Err(Error::data(
            "model split does not cover the dataset's PSEs; was it trained on this dataset?",
        ));
    }
    for ms in model.split.per_pse.values() {
        for id in ms.train.iter().chain([&ms.val, &ms.test]) {
            ds.mission(id)?;
        }
    }
    Ok(())
}

/// Split-adequacy audit: train-vs-test marginal tests over the damage-model
/// inputs and the life output, the proximity audit, and the bootstrap
/// prediction interval with its test coverage. Writes audit.json.
pub fn cmd_audit(
    dataset_dir: &Path,
    model_path: &Path,
    config: &RunConfig,
    out_dir: &Path,
) -> Result<AuditReport> {
    config.validate()?;
    let ds = load_dataset(dataset_dir)?;
    let model = PipelineModel::load(model_path)?;
    check_split_matches(&ds, &model)?;
    let split = &model.split;

    // per split: GAG feature vectors (predicted-stress path) and life data
    let mut features: BTreeMap<&'static str, Vec<GagFeatures>> = BTreeMap::new();
    let mut life_errors: BTreeMap<&'static str, Vec<f64>> = BTreeMap::new();
    let mut lives: BTreeMap<&'static str, Vec<f64>> = BTreeMap::new();
    let region = config.region_of_interest;
    for (name, which) in [("train", Split::Train), ("val", Split::Val), ("test", Split::Test)] {
        let mut fs_vec = Vec::new();
        let mut errs = Vec::new();
        let mut ls = Vec::new();
        for label in labels_in_split(&ds, split, which)? {
            let mission = ds.mission(&label.key.mission_id)?;
            let stresses = predict_segment_stresses(&model, mission, label.key.pse)?;
            let (gag, _) = build_damage_features(mission, &stresses, label.key.kt)?;
            fs_vec.push(gag);
            ls.push(label.life_n);
            if label.life_n > region.0 && label.life_n < region.1 {
                let pred = predict_sample(&model, mission, &label.key)?;
                errs.push(relative_error(pred.life_n, label.life_n)?);
            }
        }
        features.insert(name, fs_vec);
        life_errors.insert(name, errs);
        lives.insert(name, ls);
    }

    // test battery over the paper's variable list: continuous variables get
    // KS + AD, the few-valued ones (kt, n, t_flight, t_ground) get chi2
    let column = |set: &str, idx: usize| -> Vec<f64> {
        features[set].iter().map(|f| f.to_vec()[idx]).collect()
    };
    let mut battery = Vec::new();
    for (variable, idx) in [
        ("kt", 0usize),
        ("one_g_flight_bar", 1),
        ("one_g_ground_bar", 5),
        ("d_vgust_bar", 3),
        ("d_vman_bar", 2),
        ("d_turn_bar", 4),
        ("n_flights", 8),
        ("t_flight", 6),
        ("t_ground", 7),
    ] {
        let train_col = column("train", idx);
        let test_col = column("test", idx);
        let categorical = matches!(variable, "kt" | "n_flights" | "t_flight" | "t_ground");
        if categorical {
            let mut cats = train_col.clone();
            cats.extend_from_slice(&test_col);
            cats.sort_by(|a, b| a.partial_cmp(b).unwrap());
            cats.dedup();
            let (_, p) = chi2_2sample(&train_col, &test_col, &cats)?;
            battery.push(BatteryRow {
                variable: variable.to_string(),
                ks_p: None,
                ad_p: None,
                chi2_p: Some(p),
            });
        } else {
            let (_, ks_p) = ks_2sample(&train_col, &test_col)?;
            let (_, ad_p) = ad_2sample(&train_col, &test_col)?;
            battery.push(BatteryRow {
                variable: variable.to_string(),
                ks_p: Some(ks_p),
                ad_p: Some(ad_p),
                chi2_p: None,
            });
        }
    }
    let (_, ks_p) = ks_2sample(&lives["train"], &lives["test"])?;
    let (_, ad_p) = ad_2sample(&lives["train"], &lives["test"])?;
    battery.push(BatteryRow {
        variable: "life_n".to_string(),
        ks_p: Some(ks_p),
        ad_p: Some(ad_p),
        chi2_p: None,
    });

    // proximity audit on MinMax-scaled feature vectors (train-fit scaler)
    let train_rows: Vec<Vec<f64>> = features["train"].iter().map(|f| f.to_vec()).collect();
    let test_rows: Vec<Vec<f64>> = features["test"].iter().map(|f| f.to_vec()).collect();
    let scaler = MinMaxScaler::fit(&train_rows)?;
    let train_scaled: Result<Vec<Vec<f64>>> =
        train_rows.iter().map(|r| scaler.transform(r)).collect();
    let test_scaled: Result<Vec<Vec<f64>>> = test_rows.iter().map(|r| scaler.transform(r)).collect();
    let proximity = proximity_audit(
        &train_scaled?,
        &test_scaled?,
        config.proximity_alpha_close,
        config.proximity_alpha_far,
    )?;

    // prediction interval: calibrate on the validation errors inside
    // the region of interest, measure coverage on the test errors
    let calibration = &life_errors["val"];
    let test_errors = &life_errors["test"];
    if calibration.is_empty() || test_errors.is_empty() {
        return Err(Error::data(
            "no samples in the region of interest to calibrate or test the interval",
        ));
    }
    let mut interval =
        bootstrap_p95_interval(calibration, config.bootstrap_resamples, config.bootstrap_seed)?;
    let (coverage, coverage_ci) = coverage_check(
        test_errors,
        interval.epsilon,
        config.bootstrap_resamples,
        config.bootstrap_seed + 1,
    )?;
    interval.coverage = Some(coverage);
    interval.coverage_ci95 = Some(coverage_ci);

    let audit = AuditReport {
        region_of_interest: region,
        battery,
        proximity,
        interval,
        calibration_size: calibration.len(),
        test_size: test_errors.len(),
    };
    std::fs::create_dir_all(out_dir)?;
    audit.save(&out_dir.join(AUDIT_FILE))?;
    Ok(audit)
}
