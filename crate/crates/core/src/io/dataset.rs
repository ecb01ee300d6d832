//! Dataset files: segments.csv, stresses.csv, labels.csv and world.json.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{fmt_f64, parse_f64};
use crate::domain::{FlightParams, Mission, SampleKey, Segment, SegmentClass, StressVector};
use crate::error::{Error, Result};
use crate::oracle::{label_sample, OracleConfig, OracleWorld, PseCoeffs};

pub const SEGMENTS_FILE: &str = "segments.csv";
pub const STRESSES_FILE: &str = "stresses.csv";
pub const LABELS_FILE: &str = "labels.csv";
pub const WORLD_FILE: &str = "world.json";

const SEGMENTS_HEADER: &str = "mission_id,seg_index,class,flaps,tas,altitude,time,distance,thrust,pressure,mass,cma_pct,zfw,pl,fw";
const STRESSES_HEADER: &str = "mission_id,seg_index,pse,one_g,d_vman,d_vgust,d_turn";
const LABELS_HEADER: &str = "mission_id,pse,kt,d_gag,d_gm,n_flights,life_n";

/// One labels.csv row.
#[derive(Debug, Clone, PartialEq)]
pub struct LabelRow {
    pub key: SampleKey,
    pub d_gag: f64,
    pub d_gm: f64,
    pub n_flights: u32,
    pub life_n: f64,
}

/// world.json payload: generator config, per-PSE coefficients and the
/// per-mission flight counts (segments live in segments.csv).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WorldFile {
    pub config: OracleConfig,
    pub coeffs: Vec<PseCoeffs>,
    pub missions: Vec<MissionMeta>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MissionMeta {
    pub id: String,
    pub n_flights: u32,
}

/// The dataset as loaded back from disk.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub config: OracleConfig,
    pub coeffs: Vec<PseCoeffs>,
    pub missions: Vec<Mission>,
    /// (mission_id, pse) -> per-segment true stresses, in segment order.
    pub stresses: BTreeMap<(String, u8), Vec<StressVector>>,
    pub labels: Vec<LabelRow>,
}

impl Dataset {
    pub fn mission(&self, id: &str) -> Result<&Mission> {
        self.missions
            .iter()
            .find(|m| m.id == id)
            .ok_or_else(|| Error::data(format!("mission '{id}' not in dataset")))
    }

    pub fn mission_ids(&self) -> Vec<String> {
        self.missions.iter().map(|m| m.id.clone()).collect()
    }

    pub fn pses(&self) -> Vec<u8> {
        (1..=self.config.n_pse).collect()
    }

    pub fn true_stresses(&self, mission_id: &str, pse: u8) -> Result<&[StressVector]> {
        self.stresses
            .get(&(mission_id.to_string(), pse))
            .map(|v| v.as_slice())
            .ok_or_else(|| {
                Error::data(format!("no stresses for mission '{mission_id}', PSE {pse}"))
            })
    }
}

/// Generate every label and write the four dataset files.
pub fn write_dataset(world: &OracleWorld, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir)?;

    // segments.csv
    let mut segments = String::from(SEGMENTS_HEADER);
    segments.push('\n');
    for mission in &world.missions {
        for (idx, seg) in mission.segments.iter().enumerate() {
            let p = &seg.params;
            let fields = [
                mission.id.clone(),
                idx.to_string(),
                seg.class.name().to_string(),
                fmt_f64(p.flaps),
                fmt_f64(p.tas),
                fmt_f64(p.altitude),
                fmt_f64(p.time),
                fmt_f64(p.distance),
                fmt_f64(p.thrust),
                fmt_f64(p.pressure),
                fmt_f64(p.mass),
                fmt_f64(p.cma_pct),
                fmt_f64(p.zfw),
                fmt_f64(p.pl),
                fmt_f64(p.fw),
            ];
            segments.push_str(&fields.join(","));
            segments.push('\n');
        }
    }
    fs::write(dir.join(SEGMENTS_FILE), segments)?;

    // stresses.csv
    let mut stresses = String::from(STRESSES_HEADER);
    stresses.push('\n');
    for mission in &world.missions {
        for (idx, seg) in mission.segments.iter().enumerate() {
            for pse in 1..=world.config.n_pse {
                let s = crate::oracle::oracle_stress(
                    world.coeffs_for(pse)?,
                    &seg.params,
                    seg.phase(),
                )?;
                let fields = [
                    mission.id.clone(),
                    idx.to_string(),
                    pse.to_string(),
                    fmt_f64(s.one_g),
                    fmt_f64(s.d_vman),
                    fmt_f64(s.d_vgust),
                    fmt_f64(s.d_turn),
                ];
                stresses.push_str(&fields.join(","));
                stresses.push('\n');
            }
        }
    }
    fs::write(dir.join(STRESSES_FILE), stresses)?;

    // labels.csv
    let mut labels = String::from(LABELS_HEADER);
    labels.push('\n');
    for key in world.sample_keys() {
        let rec = label_sample(world, &key)?;
        let mission = world.mission(&key.mission_id)?;
        let fields = [
            key.mission_id.clone(),
            key.pse.to_string(),
            fmt_f64(key.kt),
            fmt_f64(rec.d_gag),
            fmt_f64(rec.d_gm),
            mission.n_flights.to_string(),
            fmt_f64(rec.life_n),
        ];
        labels.push_str(&fields.join(","));
        labels.push('\n');
    }
    fs::write(dir.join(LABELS_FILE), labels)?;

    // world.json
    let world_file = WorldFile {
        config: world.config.clone(),
        coeffs: world.coeffs.clone(),
        missions: world
            .missions
            .iter()
            .map(|m| MissionMeta {
                id: m.id.clone(),
                n_flights: m.n_flights,
            })
            .collect(),
    };
    fs::write(
        dir.join(WORLD_FILE),
        serde_json::to_string_pretty(&world_file)?,
    )?;
    Ok(())
}

fn read_rows(path: &Path, expected_header: &str) -> Result<Vec<Vec<String>>> {
    let text = fs::read_to_string(path)
        .map_err(|e| Error::data(format!("cannot read {}: {e}", path.display())))?;
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h == expected_header => {}
        Some(h) => {
            return Err(Error::data(format!(
                "unexpected header in {}: '{h}'",
                path.display()
            )))
        }
        None => return Err(Error::data(format!("{} is empty", path.display()))),
    }
    Ok(lines
        .filter(|l| !l.is_empty())
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect())
}

fn parse_u8(s: &str) -> Result<u8> {
    s.parse::<u8>()
        .map_err(|_| Error::data(format!("cannot parse '{s}' as an integer")))
}

/// Load a dataset directory written by [`write_dataset`].
pub fn load_dataset(dir: &Path) -> Result<Dataset> {
    let world_text = fs::read_to_string(dir.join(WORLD_FILE))
        .map_err(|e| Error::data(format!("cannot read world.json: {e}")))?;
    let world: WorldFile = serde_json::from_str(&world_text)?;
    let n_flights: BTreeMap<String, u32> = world
        .missions
        .iter()
        .map(|m| (m.id.clone(), m.n_flights))
        .collect();

    // segments
    let mut mission_segments: BTreeMap<String, Vec<(usize, Segment)>> = BTreeMap::new();
    let mut mission_order: Vec<String> = Vec::new();
    for row in read_rows(&dir.join(SEGMENTS_FILE), SEGMENTS_HEADER)? {
        if row.len() != 15 {
            return Err(Error::data(format!("segments.csv row has {} fields", row.len())));
        }
        let id = row[0].clone();
        let seg_index: usize = row[1]
            .parse()
            .map_err(|_| Error::data("bad seg_index".to_string()))?;
        let class = SegmentClass::parse(&row[2])?;
        let vals: Result<Vec<f64>> = row[3..15].iter().map(|s| parse_f64(s)).collect();
        let vals = vals?;
        let params = FlightParams {
            flaps: vals[0],
            tas: vals[1],
            altitude: vals[2],
            time: vals[3],
            distance: vals[4],
            thrust: vals[5],
            pressure: vals[6],
            mass: vals[7],
            cma_pct: vals[8],
            zfw: vals[9],
            pl: vals[10],
            fw: vals[11],
        };
        if !mission_segments.contains_key(&id) {
            mission_order.push(id.clone());
        }
        mission_segments
            .entry(id)
            .or_default()
            .push((seg_index, Segment { class, params }));
    }
    let mut missions = Vec::new();
    for id in mission_order {
        let mut segs = mission_segments.remove(&id).unwrap();
        segs.sort_by_key(|(i, _)| *i);
        let n = *n_flights
            .get(&id)
            .ok_or_else(|| Error::data(format!("mission '{id}' missing from world.json")))?;
        missions.push(Mission {
            id,
            segments: segs.into_iter().map(|(_, s)| s).collect(),
            n_flights: n,
        });
    }

    // stresses
    let mut stresses: BTreeMap<(String, u8), Vec<(usize, StressVector)>> = BTreeMap::new();
    for row in read_rows(&dir.join(STRESSES_FILE), STRESSES_HEADER)? {
        if row.len() != 7 {
            return Err(Error::data(format!("stresses.csv row has {} fields", row.len())));
        }
        let seg_index: usize = row[1]
            .parse()
            .map_err(|_| Error::data("bad seg_index".to_string()))?;
        let pse = parse_u8(&row[2])?;
        let s = StressVector {
            one_g: parse_f64(&row[3])?,
            d_vman: parse_f64(&row[4])?,
            d_vgust: parse_f64(&row[5])?,
            d_turn: parse_f64(&row[6])?,
        };
        stresses
            .entry((row[0].clone(), pse))
            .or_default()
            .push((seg_index, s));
    }
    let stresses: BTreeMap<(String, u8), Vec<StressVector>> = stresses
        .into_iter()
        .map(|(k, mut v)| {
            v.sort_by_key(|(i, _)| *i);
            (k, v.into_iter().map(|(_, s)| s).collect())
        })
        .collect();

    // labels
    let mut labels = Vec::new();
    for row in read_rows(&dir.join(LABELS_FILE), LABELS_HEADER)? {
        if row.len() != 7 {
            return Err(Error::data(format!("labels.csv row has {} fields", row.len())));
        }
        labels.push(LabelRow {
            key: SampleKey {
                mission_id: row[0].clone(),
                pse: parse_u8(&row[1])?,
                kt: parse_f64(&row[2])?,
            },
            d_gag: parse_f64(&row[3])?,
            d_gm: parse_f64(&row[4])?,
            n_flights: row[5]
                .parse()
                .map_err(|_| Error::data("bad n_flights".to_string()))?,
            life_n: parse_f64(&row[6])?,
        });
    }

    Ok(Dataset {
        config: world.config,
        coeffs: world.coeffs,
        missions,
        stresses,
        labels,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::generate_fleet;

    fn small_config() -> OracleConfig {
        OracleConfig {
            n_pse: 4,
            n_missions: 4,
            ..OracleConfig::default()
        }
    }

    #[test]
    fn dataset_round_trips_bit_exactly() {
        let world = generate_fleet(&small_config()).unwrap();
        let dir = tempfile::tempdir().unwrap();
        write_dataset(&world, dir.path()).unwrap();
        let ds = load_dataset(dir.path()).unwrap();

        assert_eq!(ds.config, world.config);
        assert_eq!(ds.coeffs, world.coeffs);
        assert_eq!(ds.missions, world.missions);
        assert_eq!(ds.labels.len(), 4 * 4 * 4);

        // stress rows reproduce the oracle bitwise
        for mission in &world.missions {
            for pse in 1..=world.config.n_pse {
                let loaded = ds.true_stresses(&mission.id, pse).unwrap();
                let truth = world.segment_stresses(mission, pse).unwrap();
                assert_eq!(loaded, truth.as_slice());
            }
        }

        // label rows reproduce label_sample bitwise
        let rec = crate::oracle::label_sample(&world, &ds.labels[0].key).unwrap();
        assert_eq!(ds.labels[0].d_gag.to_bits(), rec.d_gag.to_bits());
        assert_eq!(ds.labels[0].life_n.to_bits(), rec.life_n.to_bits());
    }

    #[test]
    fn same_world_writes_byte_identical_files() {
        let world = generate_fleet(&small_config()).unwrap();
        let dir_a = tempfile::tempdir().unwrap();
        let dir_b = tempfile::tempdir().unwrap();
        write_dataset(&world, dir_a.path()).unwrap();
        write_dataset(&world, dir_b.path()).unwrap();
        for file in [SEGMENTS_FILE, STRESSES_FILE, LABELS_FILE, WORLD_FILE] {
            let a = std::fs::read(dir_a.path().join(file)).unwrap();
            let b = std::fs::read(dir_b.path().join(file)).unwrap();
            assert_eq!(a, b, "{file} differs");
        }
    }

    #[test]
    fn missing_files_are_data_errors() {
        let dir = tempfile::tempdir().unwrap();
        let err = load_dataset(dir.path()).unwrap_err();
        assert_eq!(err.exit_code(), 3);
    }

    #[test]
    fn corrupted_header_is_rejected() {
        let world = generate_fleet(&small_config()).unwrap();
        let dir = tempfile::tempdir().unwrap();
        write_dataset(&world, dir.path()).unwrap();
        let path = dir.path().join(LABELS_FILE);
        let text = std::fs::read_to_string(&path).unwrap();
        std::fs::write(&path, text.replace(LABELS_HEADER, "bogus,header")).unwrap();
        assert!(load_dataset(dir.path()).is_err());
    }
}
