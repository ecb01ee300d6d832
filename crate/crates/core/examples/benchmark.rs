use std::time::Instant;
use fatigue_pipeline::commands::{cmd_evaluate, cmd_generate, cmd_train, cmd_audit};
use fatigue_pipeline::io::RunConfig;

fn main() {
    let t0 = Instant::now();
    let config = RunConfig::default(); // oracle seed 42
    let base = std::path::PathBuf::from("/tmp/bench");
    let data = base.join("data");
    let model_dir = base.join("model");
    let report_dir = base.join("report");

    cmd_generate(&config, &data).unwrap();
    println!("generate: {:.1?}", t0.elapsed());

    let t1 = Instant::now();
    cmd_train(&data, &config, &model_dir).unwrap();
    println!("train: {:.1?}", t1.elapsed());

    let t2 = Instant::now();
    let report = cmd_evaluate(&data, &model_dir.join("model.json"), &config, &report_dir).unwrap();
    println!("evaluate: {:.1?}", t2.elapsed());

    println!("\n=== Phase I flight stress MRE per component (test) ===");
    for (name, eval) in &report.stress_eval {
        println!("  {name}: mean {:.3}% median {:.3}%", eval.summary.mean, eval.summary.median);
        println!("    by mission: {:?}", eval.mre_by_mission.iter().map(|(k,v)| format!("{k}:{v:.2}")).collect::<Vec<_>>());
    }
    println!("ground one_g: mean {:.2e}% max {:.2e}%", report.ground_summary.mean, report.ground_summary.max);
    println!("\n=== Phase II (test) ===");
    println!("  d_gag: mean {:.2}% median {:.2}% max {:.2}%", report.d_gag_summary.mean, report.d_gag_summary.median, report.d_gag_summary.max);
    println!("  d_gm:  mean {:.2}% median {:.2}% max {:.2}%", report.d_gm_summary.mean, report.d_gm_summary.median, report.d_gm_summary.max);
    println!("\n=== Life (test) ===");
    println!("  full:   mean {:.2}% median {:.2}% max {:.2}%", report.life_summary_full.mean, report.life_summary_full.median, report.life_summary_full.max);
    if let Some(r) = &report.life_summary_region {
        println!("  region: mean {:.2}% median {:.2}% max {:.2}%  (n region rows)", r.mean, r.median, r.max);
    }
    let n_region = report.rows.iter().filter(|r| r.true_life > 1e3 && r.true_life < 1e6).count();
    println!("  rows: {} total, {} in region", report.rows.len(), n_region);

    // Spearman(true d_gag, rel err)
    let x: Vec<f64> = report.rows.iter().map(|r| r.true_d_gag).collect();
    let y: Vec<f64> = report.rows.iter().map(|r| r.err_d_gag_pct).collect();
    let (rho, p) = fatigue_pipeline::stats::spearman(&x, &y).unwrap();
    println!("\nSpearman(true d_gag, rel err): rho {:.3}, p {:.2e}", rho, p);

    // shifted mission check: mission A MRE vs overall mean per component
    println!("\nShifted-mission check (A vs mean):");
    for (name, eval) in &report.stress_eval {
        let a = eval.mre_by_mission.get("A");
        println!("  {name}: A {:?} vs mean {:.3}", a, eval.summary.mean);
    }

    let t3 = Instant::now();
    let audit = cmd_audit(&data, &model_dir.join("model.json"), &config, &report_dir).unwrap();
    println!("\naudit: {:.1?}", t3.elapsed());
    println!("epsilon {:.4} coverage {:?} ci {:?}", audit.interval.epsilon, audit.interval.coverage, audit.interval.coverage_ci95);
    println!("battery:");
    for row in &audit.battery {
        println!("  {}: ks {:?} ad {:?} chi2 {:?}", row.variable, row.ks_p, row.ad_p, row.chi2_p);
    }
    println!("proximity: {} p-hacking, {} isolated of {}", audit.proximity.p_hacking_indices.len(), audit.proximity.isolated_indices.len(), audit.test_size);
    println!("\nTOTAL: {:.1?}", t0.elapsed());
}
