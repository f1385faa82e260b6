//! Compares the nearest-next tour with the exact open tour on the goal grid
//! of a 3x3 layout, using straight-line distances.
//!
//! cargo run --release --example tours

use mgmm::tour::{exact_tour, greedy_tour, CostMatrix};
use mgmm::world::{layout_goals, GoalLayout};

fn main() -> mgmm::Result<()> {
    let goals = layout_goals(GoalLayout::Grid3);
    let n = goals.len();
    // Index 0 is the start, goal g is g + 1.
    let start = mgmm::world::Point2::new(1.0, 28.0);
    let point = |i: usize| if i == 0 { start } else { goals[i - 1].center };
    let costs = CostMatrix::from_fn(n + 1, |i, j| point(i).dist(point(j)));
    let all: Vec<usize> = (1..=n).collect();

    let greedy = greedy_tour(&costs, 0, &all);
    let exact = exact_tour(&costs, 0, &all)?;
    let show = |order: &[usize]| {
        order
            .iter()
            .map(|g| (g - 1).to_string())
            .collect::<Vec<_>>()
            .join(" ")
    };
    println!("greedy: {:6.2} m  {}", greedy.cost, show(&greedy.order));
    println!("exact:  {:6.2} m  {}", exact.cost, show(&exact.order));
    Ok(())
}
