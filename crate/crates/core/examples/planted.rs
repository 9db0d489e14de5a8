//! Trains on planted-signal data and reports recovery of the planted direction.

use ultradense::eval::{run_pipeline, Experiment};
use ultradense::linalg::dot;
use ultradense::synthetic::{PlantedConfig, PlantedData};
use ultradense::{Property, SubspaceSpec, TauVariant, TrainConfig};

fn main() -> ultradense::Result<()> {
    let seed: u64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(1);
    let data = PlantedData::generate(&PlantedConfig { seed, ..Default::default() })?;
    let table = data.table().split(0.2, seed)?;
    let gold = data.planted_gold(&table);
    let spec = SubspaceSpec::new(Property::Sentiment, vec![0], 0.4)?;
    let mut train = TrainConfig::new(vec![spec], seed);
    train.check_every_step = false;
    let exp = Experiment {
        embeddings: &data.embeddings,
        table: &table,
        gold: &gold,
        train,
        variant: TauVariant::TauB,
    };
    let out = run_pipeline(&exp)?;
    let dir = out.training.transform.oriented_direction(&Property::Sentiment)?;
    let costs = &out.training.cost_history;
    println!("tau={:.4} cos={:.4}", out.report.tau, dot(&dir, &data.direction));
    for i in [0, 10, 25, 50, 75, 100, 150, 200, 300, 500, 999] {
        println!("cost[{i}]={:.4}", costs[i]);
    }
    println!("time={:?}", out.training.wall_time);
    Ok(())
}
