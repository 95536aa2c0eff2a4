//! The shipped `data/` files agree with the builders and parse back.
//! Run with `PROCKIT_REGEN=1` to rewrite them.

use std::collections::BTreeMap;
use std::path::PathBuf;

use prockit::models::{self, build, Model};
use prockit::petri::Net;
use prockit::recspec::RecSpec;
use prockit::{CommFn, Lts};

fn data_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data")
}

fn params(pairs: &[(&str, &str)]) -> BTreeMap<String, String> {
    pairs.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect()
}

fn text(m: &Model) -> String {
    match m {
        Model::Lts(l) => l.to_text(),
        Model::Net(n) => n.to_text(),
        Model::Spec(s) => s.to_text(),
    }
}

/// Data file, catalogue name, parameters.
type Entry<'a> = (&'a str, &'a str, Vec<(&'a str, &'a str)>);

fn expected() -> Vec<(String, String)> {
    let d1 = [("D", "d")];
    let d2 = [("D", "0,1")];
    let models: Vec<Entry> = vec![
        ("counter3.lts", "counter", vec![("k", "3")]),
        ("counter_mod3.lts", "counter_mod", vec![("k", "3")]),
        ("unreliable_counter3.lts", "unreliable_counter", vec![("k", "3")]),
        ("counter_unbounded.spec", "counter_unbounded", vec![]),
        ("buffer2.lts", "buffer", d2.to_vec()),
        ("unreliable_buffer2.lts", "unreliable_buffer", d2.to_vec()),
        ("buffer2.spec", "buffer2_spec", vec![]),
        ("split.lts", "split", d2.to_vec()),
        ("splitlike.lts", "split_like", d2.to_vec()),
        ("merge.lts", "merge", d2.to_vec()),
        ("merge_alt.lts", "merge_alt", d2.to_vec()),
        ("sink.lts", "sink", d2.to_vec()),
        ("non_inert_a.lts", "non_inert_a", vec![]),
        ("non_inert_b.lts", "non_inert_b", vec![]),
        ("inert_a.lts", "inert_a", vec![]),
        ("inert_b.lts", "inert_b", vec![]),
        ("abp_sender.lts", "abp_sender", d1.to_vec()),
        ("abp_receiver.lts", "abp_receiver", d1.to_vec()),
        ("abp_channel_k.lts", "abp_channel_k", d1.to_vec()),
        ("abp_channel_l.lts", "abp_channel_l", vec![]),
        ("abp_hidden.lts", "abp_hidden", d1.to_vec()),
        ("buffer1.lts", "buffer1", d1.to_vec()),
        ("abp_sender.spec", "abp_sender_spec", d1.to_vec()),
        ("abp_receiver.spec", "abp_receiver_spec", d1.to_vec()),
        ("abp_channel_k.spec", "abp_channel_k_spec", d1.to_vec()),
        ("abp_channel_l.spec", "abp_channel_l_spec", vec![]),
        ("memory_cell.net", "memory_cell", vec![]),
        ("memory_cell.spec", "memory_cell_spec", vec![]),
        ("scheduler3.net", "scheduler", vec![("n", "3")]),
        ("scheduler3.spec", "scheduler_specs", vec![("n", "3")]),
        ("counter_net.net", "counter_net", vec![]),
        ("counter_net_concurrent.net", "counter_net_concurrent", vec![]),
        ("factorial.lts", "factorial", vec![]),
        ("gcd.lts", "gcd", vec![]),
        ("peterson_p0.lts", "peterson_p0", vec![]),
        ("peterson_p1.lts", "peterson_p1", vec![]),
        ("calculator.lts", "calculator", vec![("min", "0"), ("max", "2")]),
        ("workcell.spec", "workcell", vec![("N", "2"), ("P", "p")]),
    ];
    let mut out: Vec<(String, String)> = models
        .into_iter()
        .map(|(file, name, ps)| (file.to_string(), text(&build(name, &params(&ps)).unwrap())))
        .collect();
    out.push(("abp.comm".into(), models::abp_comm(&["d"]).to_text()));
    out.push(("scheduler3.comm".into(), models::scheduler_comm(3).to_text()));
    out.push(("workcell.comm".into(), models::workcell_comm(2, &["p"]).to_text()));
    out
}

#[test]
fn data_files_match_builders() {
    let regen = std::env::var_os("PROCKIT_REGEN").is_some();
    for (file, want) in expected() {
        let path = data_dir().join(&file);
        if regen {
            std::fs::write(&path, &want).unwrap();
            continue;
        }
        let got = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{file}: {e}"));
        assert_eq!(got, want, "{file} is stale; rerun with PROCKIT_REGEN=1");
    }
}

#[test]
fn data_files_parse() {
    for entry in std::fs::read_dir(data_dir()).unwrap() {
        let path = entry.unwrap().path();
        let text = std::fs::read_to_string(&path).unwrap();
        let name = path.display().to_string();
        match path.extension().and_then(|e| e.to_str()) {
            Some("lts") => assert_eq!(Lts::parse_text(&text).map(|l| l.to_text()).as_deref(), Ok(text.as_str()), "{name}"),
            Some("net") => assert_eq!(Net::parse_text(&text).map(|n| n.to_text()).as_deref(), Ok(text.as_str()), "{name}"),
            Some("spec") => assert_eq!(RecSpec::parse(&text).map(|s| s.to_text()).as_deref(), Ok(text.as_str()), "{name}"),
            Some("comm") => assert_eq!(CommFn::parse_text(&text).map(|g| g.to_text()).as_deref(), Ok(text.as_str()), "{name}"),
            _ => {}
        }
    }
}
