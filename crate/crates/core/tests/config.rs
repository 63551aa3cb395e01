use std::path::Path;

use quietpump_core::config::{ConfigError, PlantKind, RunConfig};
use quietpump_core::mpc::CostOption;

fn shipped() -> &'static Path {
    Path::new(concat!(env!("CARGO_MANIFEST_DIR"), "/../../configs/default.toml"))
}

#[test]
fn shipped_config_spells_out_the_defaults() {
    assert_eq!(RunConfig::load(shipped()).unwrap(), RunConfig::default());
}

#[test]
fn written_config_loads_back() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.toml");
    let mut cfg = RunConfig::default();
    cfg.seed = 9;
    cfg.plant.kind = PlantKind::Rc;
    cfg.sweep.options = vec![CostOption::Exceedance];
    cfg.sweep.etas = vec![0.0, 5.0];
    std::fs::write(&path, cfg.to_toml()).unwrap();
    assert_eq!(RunConfig::load(&path).unwrap(), cfg);
}

#[test]
fn missing_file_is_a_read_error() {
    let err = RunConfig::load(Path::new("/nonexistent/run.toml")).unwrap_err();
    assert!(matches!(err, ConfigError::Read { .. }), "{err}");
}

#[test]
fn unknown_keys_are_named_in_every_section() {
    for (section, key) in [
        ("", "sead"),
        ("[plant]", "initial_c"),
        ("[plant.rc]", "copp"),
        ("[weather.tariff]", "peak"),
        ("[noise.ambient]", "floor"),
        ("[controller]", "horizon"),
        ("[sweep]", "grid"),
        ("[io]", "timing"),
    ] {
        let text = format!("{section}\n{key} = 1\n");
        let err = RunConfig::from_toml(&text).unwrap_err();
        assert!(matches!(err, ConfigError::Parse(_)), "{section}: {err}");
        assert!(err.to_string().contains(key), "{section}: {err}");
    }
}

#[test]
fn cross_section_rules() {
    let bad = [
        "[controller]\np_max_W = 9000.0\n",
        "[sweep]\noptions = [\"baseline\"]\n",
        "[sweep]\ndays = 0\n",
        "[sweep]\nmax_nodes = 0\n",
        "[plant.rc]\ncop = 0.5\n",
        "[weather.climate]\ndaylight_start_h = 18.0\ndaylight_end_h = 8.0\n",
        "[noise.ambient]\npeak_db = 30.0\n",
        "[controller]\neta = -1.0\n",
    ];
    for text in bad {
        let err = RunConfig::from_toml(text).unwrap_err();
        assert!(matches!(err, ConfigError::Invalid { .. }), "{text}: {err}");
    }
}
