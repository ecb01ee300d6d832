use fatigue_pipeline::oracle::{generate_fleet, label_sample, OracleConfig};

fn main() {
    let world = generate_fleet(&OracleConfig::default()).unwrap();
    let mut lives = Vec::new();
    let mut gag_frac = Vec::new();
    let mut max_sigma_m: f64 = 0.0;
    let mut one_g_min: f64 = f64::INFINITY;
    let mut d_components: (f64, f64) = (f64::INFINITY, f64::INFINITY);
    for key in world.sample_keys() {
        let r = label_sample(&world, &key).unwrap();
        lives.push(r.life_n);
        gag_frac.push(r.d_gag / (r.d_gag + r.d_gm));
        let sm = 0.5 * (r.gag_cycle.sigma_max + r.gag_cycle.sigma_min);
        max_sigma_m = max_sigma_m.max(sm);
        for s in &r.stresses {
            if s.d_vman > 0.0 {
                one_g_min = one_g_min.min(s.one_g.min(s.d_vman).min(s.d_vgust).min(s.d_turn));
            }
        }
        d_components = (d_components.0.min(r.d_gag), d_components.1.min(r.d_gm));
    }
    lives.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let q = |p: f64| lives[((lives.len() - 1) as f64 * p) as usize];
    println!("life min {:.3e} q05 {:.3e} q25 {:.3e} med {:.3e} q75 {:.3e} q95 {:.3e} max {:.3e}",
        lives[0], q(0.05), q(0.25), q(0.5), q(0.75), q(0.95), lives[lives.len()-1]);
    let in_roi = lives.iter().filter(|&&l| l > 1e3 && l < 1e6).count();
    println!("in region of interest (1e3,1e6): {} / {}", in_roi, lives.len());
    let gag_dominant = gag_frac.iter().filter(|&&f| f > 0.5).count();
    println!("GAG dominant fraction: {} / {}", gag_dominant, gag_frac.len());
    let mean_gag: f64 = gag_frac.iter().sum::<f64>() / gag_frac.len() as f64;
    println!("mean GAG share {:.3}; max gag sigma_m {:.1}; min flight stress component {:.2}", mean_gag, max_sigma_m, one_g_min);
}
