//! Builds an experience dataset for one scene class, trains the per-pair
//! encoders and reports held-out retrieval accuracy.
//!
//! cargo run --release --example train_memory -- maze 2x2 [originals] [augmentations] [store.mm]

use std::time::Instant;

use mgmm::memory::{build_dataset, score_held_out, train_store, DatasetConfig, EncoderConfig};
use mgmm::world::{GoalLayout, SceneClass};
use mgmm::Error;

fn main() -> mgmm::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let class: SceneClass = args.first().map_or("maze", String::as_str).parse()?;
    let layout: GoalLayout = args.get(1).map_or("2x2", String::as_str).parse()?;
    let mut cfg = DatasetConfig::desk(class, layout);
    if let Some(n) = args.get(2) {
        cfg.originals = n.parse().map_err(|_| Error::Parse(n.clone()))?;
    }
    if let Some(m) = args.get(3) {
        cfg.augmentations = m.parse().map_err(|_| Error::Parse(m.clone()))?;
    }

    let t0 = Instant::now();
    let data = build_dataset(&cfg)?;
    let clusters: usize = data.pairs.iter().map(|p| p.clusters.len()).sum();
    println!(
        "dataset: {} pairs, {clusters} clusters in {:.1} s",
        data.pairs.len(),
        t0.elapsed().as_secs_f64()
    );

    let t1 = Instant::now();
    let store = train_store(&data, &EncoderConfig::default())?;
    println!("training: {:.1} s", t1.elapsed().as_secs_f64());
    for p in &data.pairs {
        let Ok(mem) = store.pair(p.from, p.to) else {
            continue;
        };
        let first = mem.loss_curve.first().copied().unwrap_or(0.0);
        let last = mem.loss_curve.last().copied().unwrap_or(0.0);
        println!(
            "  pair {} -> {}: loss {first:.3} -> {last:.3}",
            p.from, p.to
        );
    }

    let score = score_held_out(&store, &data);
    println!(
        "held-out retrieval: {}/{} own cluster ({:.1}%), {} collision-free ({:.1}%)",
        score.own_cluster,
        score.queries,
        100.0 * score.accuracy(),
        score.collision_free,
        100.0 * score.free_rate()
    );
    if let Some(path) = args.get(4) {
        store.save(path)?;
        println!("saved {path}");
    }
    Ok(())
}
