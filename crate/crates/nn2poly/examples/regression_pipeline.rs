//! End-to-end regression walk-through: generate data from a known polynomial,
//! train a norm-constrained network on it, convert the network back into a
//! polynomial, and check that the polynomial mimics the network.
//!
//! ```bash
//! cargo run --release --example regression_pipeline
//! ```

use ndarray::Axis;
use nn2poly::{
    gen_poly_data, scale_to_unit, split_train_test, train, transform, Architecture, Constraint,
    Polynomial, Response, TrainConfig, TransformConfig,
};

fn main() -> nn2poly::Result<()> {
    // Y = 2 - 2 X1 + 5 X2 X3 + 3 X4 over five variables; X5 never appears,
    // so it should not pick up any meaningful coefficient.
    let truth = Polynomial::from_json_str(
        r#"{"p": 5, "max_order": 2,
            "labels": [[0], [1], [2, 3], [4]],
            "values": [[2.0], [-2.0], [5.0], [3.0]]}"#,
    )?;

    println!("generating 500 samples with noise sd 0.05");
    let raw = gen_poly_data(&truth, 500, 0.05, 42)?;
    let scaled = scale_to_unit(&raw)?;
    let (train_set, test_set) = split_train_test(&scaled, 0.75, 42)?;

    let arch: Architecture = "50:tanh,100:tanh,50:tanh,1:linear".parse()?;
    let config = TrainConfig {
        epochs: 900,
        batch_size: 50,
        constraint: Constraint::L1Norm,
        seed: 42,
        validation_split: 0.2,
        ..TrainConfig::default()
    };
    println!(
        "training 5-50-100-50-1 tanh network, l1 constraint, {} epochs",
        config.epochs
    );
    let (net, history) = train(&train_set, &arch, &config)?;
    let last = history.last().unwrap();
    println!(
        "final losses: train {:.6}, validation {:.6}",
        last.train_loss,
        last.val_loss.unwrap_or(f64::NAN)
    );

    let poly = transform(&net, &TransformConfig::default())?.into_final_polynomial();
    println!("extracted polynomial with {} terms", poly.len());

    // how close is the polynomial to the network it came from?
    let nn_pred = net.forward(test_set.x())?;
    let poly_pred = poly.eval(test_set.x())?;
    let nn_mean = nn_pred.mean_axis(Axis(0)).unwrap()[0];
    let ss_res: f64 = nn_pred
        .iter()
        .zip(poly_pred.iter())
        .map(|(a, b)| (a - b) * (a - b))
        .sum();
    let ss_tot: f64 = nn_pred.iter().map(|a| (a - nn_mean) * (a - nn_mean)).sum();
    println!("r² of polynomial vs network on the test split: {:.5}", 1.0 - ss_res / ss_tot);

    // the response is also scaled, so compare against it too
    if let Response::Regression(y) = test_set.response() {
        let ss_res: f64 = y
            .iter()
            .zip(poly_pred.iter())
            .map(|(a, b)| (a - b) * (a - b))
            .sum();
        let y_mean = y.mean().unwrap();
        let ss_tot: f64 = y.iter().map(|a| (a - y_mean) * (a - y_mean)).sum();
        println!("r² of polynomial vs true response:        {:.5}", 1.0 - ss_res / ss_tot);
    }

    println!("\ntop 10 coefficients by |value|:");
    for (label, value) in &poly.top_coefficients(10)[0] {
        println!("  {:>10}  {:+.5}", label.to_string(), value);
    }
    Ok(())
}
