use std::fs::{self, File};
use std::path::{Path, PathBuf};

use ahft_core::alt::{
    fit_mle, predict_with_interval, regression_table, sweep_curve, FactorSpec, FactorValues,
    FitConfig, FitDiagnostics, GllWeibullModel, Transform,
};
use ahft_core::dataset::{
    builtin_table3, builtin_table3_printed, builtin_table8, load_csv, load_life_csv,
    normalize_name, Dataset, PsfCatalog, FATIGUE_COLUMN,
};
use ahft_core::pca::{run_pca, select_factors, PcaResult, SelectionResult};
use ahft_core::validate::{evaluate, generate_synthetic, SyntheticSpec};
use ahft_core::Error;
use anyhow::{bail, Context, Result};

use crate::args::{
    Command, CurvesArgs, FitArgs, InputSource, ModelArgs, OutputArgs, PcaArgs, PredictArgs,
    SimulateArgs, ValidateArgs,
};
use crate::svg::Chart;

pub fn run(command: Command) -> Result<()> {
    match command {
        Command::Pca(a) => pca(a),
        Command::Fit(a) => fit(a),
        Command::Predict(a) => predict(a),
        Command::Validate(a) => validate(a),
        Command::Curves(a) => curves(a),
        Command::Simulate(a) => simulate(a),
    }
}

/// Process exit status for a failed command.
pub fn exit_code(err: &anyhow::Error) -> u8 {
    let core = err.chain().find_map(|c| c.downcast_ref::<Error>());
    match core {
        Some(Error::NoConvergence(_)) => 3,
        Some(Error::SingularInformation | Error::DegenerateFactor(_)) => 4,
        _ => 2,
    }
}

/// Shortest representation that parses back to the same value.
fn num(v: f64) -> String {
    format!("{v:?}")
}

fn load_dataset(source: &InputSource, life_data: bool) -> Result<Dataset> {
    match source {
        InputSource::Table3 => Ok(builtin_table3()),
        InputSource::Table3Printed => Ok(builtin_table3_printed()),
        InputSource::Table8 => Ok(builtin_table8()),
        InputSource::File(path) => {
            let file =
                File::open(path).with_context(|| format!("{}: cannot open", path.display()))?;
            let catalog = PsfCatalog::standard();
            let data = if life_data {
                load_life_csv(file, &catalog)
            } else {
                load_csv(file, &catalog)
            };
            data.with_context(|| path.display().to_string())
        }
    }
}

fn output_dir(o: &OutputArgs) -> Result<&Path> {
    fs::create_dir_all(&o.out_dir)
        .with_context(|| format!("{}: cannot create output directory", o.out_dir.display()))?;
    Ok(&o.out_dir)
}

fn model_path(m: &ModelArgs, o: &OutputArgs) -> PathBuf {
    m.model
        .clone()
        .unwrap_or_else(|| o.out_dir.join("model.json"))
}

fn load_model(path: &Path) -> Result<GllWeibullModel> {
    GllWeibullModel::load(path).with_context(|| format!("{}: cannot read model", path.display()))
}

fn write_csv(path: &Path, header: &[String], rows: &[Vec<String>]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)
        .with_context(|| format!("{}: cannot write", path.display()))?;
    w.write_record(header)?;
    for r in rows {
        w.write_record(r)?;
    }
    w.flush()?;
    Ok(())
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).with_context(|| format!("{}: cannot write", path.display()))
}

fn strings(items: &[&str]) -> Vec<String> {
    items.iter().map(|s| s.to_string()).collect()
}

fn factor_label(f: &FactorSpec) -> String {
    match f.transform {
        Transform::Identity => f.name.clone(),
        t => format!("{} [{t}]", f.name),
    }
}

fn value_for(values: &FactorValues, name: &str) -> Option<f64> {
    let key = normalize_name(name);
    values
        .iter()
        .find(|(k, _)| normalize_name(k) == key)
        .map(|(_, v)| *v)
}

fn analyse(data: &Dataset, threshold: f64) -> Result<(PcaResult, SelectionResult)> {
    let columns = data.analysis_columns();
    let refs: Vec<&str> = columns.iter().map(String::as_str).collect();
    let pca = run_pca(data, &refs)?;
    let selection = select_factors(&pca, threshold, FATIGUE_COLUMN)?;
    Ok((pca, selection))
}

fn pca(a: PcaArgs) -> Result<()> {
    let data = load_dataset(&a.input.input, a.input.life_data)?;
    let (pca, sel) = analyse(&data, a.threshold)?;
    let dir = output_dir(&a.output)?;
    let k = pca.components();
    let pc = |c: usize| format!("PC{}", c + 1);

    let eigen: Vec<Vec<String>> = (0..k)
        .map(|c| {
            vec![
                pc(c),
                num(pca.eigenvalues[c]),
                num(pca.proportions[c]),
                num(pca.cumulative[c]),
            ]
        })
        .collect();
    write_csv(
        &dir.join("eigen.csv"),
        &strings(&["Component", "Eigenvalue", "Proportion", "Cumulative"]),
        &eigen,
    )?;

    let mut header = vec!["Variable".to_string()];
    header.extend((0..k).map(pc));
    let loadings: Vec<Vec<String>> = pca
        .column_names
        .iter()
        .enumerate()
        .map(|(i, name)| {
            std::iter::once(name.clone())
                .chain((0..k).map(|c| num(pca.eigenvectors[(i, c)])))
                .collect()
        })
        .collect();
    write_csv(&dir.join("loadings.csv"), &header, &loadings)?;

    let scree: Vec<(f64, f64)> = (0..k)
        .map(|c| ((c + 1) as f64, pca.eigenvalues[c]))
        .collect();
    let rows: Vec<Vec<String>> = scree
        .iter()
        .map(|(c, v)| vec![format!("{c}"), num(*v)])
        .collect();
    write_csv(
        &dir.join("scree.csv"),
        &strings(&["Component", "Eigenvalue"]),
        &rows,
    )?;
    let chart = Chart {
        title: "Scree plot",
        x_label: "Component",
        y_label: "Eigenvalue",
        points: &scree,
    };
    write_text(&dir.join("scree.svg"), &chart.render())?;

    let retained = sel.retained_components;
    let mut text = format!(
        "threshold: {}\nretained_components: {retained}\ncumulative_proportion: {}\n",
        num(a.threshold),
        num(pca.cumulative[retained - 1])
    );
    if pca.tied.iter().any(|t| *t) {
        text.push_str("note: some eigenvalues are tied; their loadings are not unique\n");
    }
    text.push_str("rank,factor,score\n");
    for (i, f) in sel.selected_factors.iter().enumerate() {
        text.push_str(&format!("{},{},{}\n", i + 1, f.name, num(f.score)));
    }
    write_text(&dir.join("selection.txt"), &text)?;

    println!(
        "{retained} of {k} components explain {:.3} of the variance (threshold {})",
        pca.cumulative[retained - 1],
        a.threshold
    );
    println!(
        "factor ranking: {}",
        sel.top(sel.selected_factors.len()).join(", ")
    );
    Ok(())
}

fn write_diagnostics(dir: &Path, d: &FitDiagnostics) -> Result<()> {
    let alpha: Vec<String> = d.alpha.iter().map(|v| num(*v)).collect();
    let text = format!(
        "converged: false\nreason: {}\niterations: {}\ngradient_max_norm: {}\nlog_likelihood: {}\nalpha: {}\nshape: {}\nshape_diverged: {}\n",
        d.reason,
        d.iterations,
        num(d.gradient_max_norm),
        num(d.log_likelihood),
        alpha.join(","),
        num(d.shape),
        d.shape_diverged
    );
    write_text(&dir.join("diagnostics.txt"), &text)
}

fn fit(a: FitArgs) -> Result<()> {
    let data = load_dataset(&a.input.input, a.input.life_data)?;
    let factors: Vec<FactorSpec> = if a.factors.is_empty() {
        if a.top == 0 {
            bail!("--top must be at least 1");
        }
        let (_, sel) = analyse(&data, a.threshold)?;
        sel.top(a.top)
            .into_iter()
            .map(FactorSpec::identity)
            .collect()
    } else {
        a.factors
            .iter()
            .map(|f| {
                let name = data
                    .display_name(&f.name)
                    .ok_or_else(|| Error::MissingColumn(f.name.clone()))?;
                Ok(FactorSpec::new(name, f.transform))
            })
            .collect::<Result<_>>()?
    };
    let config = FitConfig {
        max_iterations: a.max_iterations,
        confidence_level: a.confidence,
        ..FitConfig::default()
    };
    let dir = output_dir(&a.output)?;
    let model = match fit_mle(&data, &factors, FATIGUE_COLUMN, &config) {
        Ok(m) => m,
        Err(Error::NoConvergence(d)) => {
            write_diagnostics(dir, &d)?;
            return Err(Error::NoConvergence(d).into());
        }
        Err(e) => return Err(e.into()),
    };
    model.save(&dir.join("model.json"))?;

    let table = regression_table(&model, a.confidence)?;
    let labels: Vec<String> = std::iter::once("Intercept".to_string())
        .chain(model.factors.iter().map(factor_label))
        .chain(std::iter::once("Shape".to_string()))
        .collect();
    let opt = |v: Option<f64>| v.map(num).unwrap_or_default();
    let rows: Vec<Vec<String>> = table
        .iter()
        .zip(&labels)
        .map(|(r, label)| {
            vec![
                label.clone(),
                num(r.coef),
                num(r.std_error),
                opt(r.z),
                opt(r.p),
                num(r.lower),
                num(r.upper),
            ]
        })
        .collect();
    write_csv(
        &dir.join("regression.csv"),
        &strings(&[
            "Predictor",
            "Coef",
            "StandardError",
            "Z",
            "P",
            "LowerCI",
            "UpperCI",
        ]),
        &rows,
    )?;

    println!(
        "converged in {} iterations, log-likelihood {:.4}",
        model.fit_meta.iterations, model.fit_meta.log_likelihood
    );
    println!(
        "{:<24} {:>12} {:>12} {:>8} {:>8} {:>12} {:>12}",
        "Predictor", "Coef", "SE", "Z", "P", "Lower", "Upper"
    );
    for (r, label) in table.iter().zip(&labels) {
        let z = r.z.map(|v| format!("{v:.2}")).unwrap_or_default();
        let p = r.p.map(|v| format!("{v:.3}")).unwrap_or_default();
        println!(
            "{label:<24} {:>12.4} {:>12.4} {z:>8} {p:>8} {:>12.4} {:>12.4}",
            r.coef, r.std_error, r.lower, r.upper
        );
    }
    Ok(())
}

fn predict(a: PredictArgs) -> Result<()> {
    let path = model_path(&a.model, &a.output);
    let model = load_model(&path)?;
    let dir = output_dir(&a.output)?;
    let mut header: Vec<String> = model.factors.iter().map(|f| f.name.clone()).collect();
    header.extend(strings(&[
        "Percentile",
        "StandardError",
        "LowerCI",
        "UpperCI",
        "Probability",
    ]));
    let mut rows = Vec::new();
    for at in &a.at {
        let pred = predict_with_interval(&model, at, a.percentile, a.confidence)?;
        let mut row: Vec<String> = model
            .factors
            .iter()
            .map(|f| value_for(at, &f.name).map(num).unwrap_or_default())
            .collect();
        row.extend([
            num(pred.value),
            num(pred.std_error),
            num(pred.ci_lower),
            num(pred.ci_upper),
            num(pred.percentile_p),
        ]);
        rows.push(row);
    }
    write_csv(&dir.join("prediction.csv"), &header, &rows)?;
    println!("{}", header.join("\t"));
    for r in &rows {
        println!("{}", r.join("\t"));
    }
    Ok(())
}

fn validate(a: ValidateArgs) -> Result<()> {
    let model = load_model(&model_path(&a.model, &a.output))?;
    let holdout = load_dataset(&a.input, a.life_data)?;
    let report = evaluate(&model, &holdout, a.percentile)?;
    let dir = output_dir(&a.output)?;
    let mut header = vec!["Instance".to_string()];
    header.extend(holdout.psf_names().iter().cloned());
    header.extend(strings(&["Fatigue", "ALTFatigue", "RelativeError"]));
    let rows: Vec<Vec<String>> = report
        .rows
        .iter()
        .zip(holdout.rows())
        .map(|(r, obs)| {
            let mut row = vec![r.instance.to_string()];
            row.extend(obs.psf_values.iter().map(|v| num(*v)));
            row.extend([num(r.observed), num(r.predicted), num(r.relative_error)]);
            row
        })
        .collect();
    write_csv(&dir.join("validation.csv"), &header, &rows)?;
    let summary = format!(
        "percentile: {}\nmean_relative_error: {}\nmax_relative_error: {}\n",
        num(report.percentile),
        num(report.mean_relative_error),
        num(report.max_relative_error)
    );
    write_text(&dir.join("validation_summary.txt"), &summary)?;
    println!("mean relative error: {:.4}", report.mean_relative_error);
    println!("max relative error: {:.4}", report.max_relative_error);
    Ok(())
}

fn curves(a: CurvesArgs) -> Result<()> {
    let model = load_model(&model_path(&a.model, &a.output))?;
    let fixed: FactorValues =
        a.at.iter()
            .flatten()
            .map(|(k, v)| (k.clone(), *v))
            .collect();
    let dir = output_dir(&a.output)?;
    for sweep in &a.sweep {
        let points = sweep_curve(&model, &sweep.factor, &sweep.grid, &fixed, a.percentile)?;
        let key = normalize_name(&sweep.factor);
        let name = model
            .factors
            .iter()
            .find(|f| normalize_name(&f.name) == key)
            .map_or_else(|| sweep.factor.clone(), |f| f.name.clone());
        let rows: Vec<Vec<String>> = points.iter().map(|(x, y)| vec![num(*x), num(*y)]).collect();
        write_csv(
            &dir.join(format!("curve_{key}.csv")),
            &[name.clone(), "Fatigue".into()],
            &rows,
        )?;
        let title = format!("Fatigue against {name}");
        let chart = Chart {
            title: &title,
            x_label: &name,
            y_label: "Fatigue",
            points: &points,
        };
        write_text(&dir.join(format!("curve_{key}.svg")), &chart.render())?;
        println!("{name}: {} points", points.len());
    }
    Ok(())
}

fn simulate(a: SimulateArgs) -> Result<()> {
    let pools = a
        .factors
        .iter()
        .map(|f| {
            let key = normalize_name(&f.name);
            a.pool
                .iter()
                .find(|(n, _)| normalize_name(n) == key)
                .map(|(_, v)| v.clone())
                .with_context(|| format!("no --pool given for factor `{}`", f.name))
        })
        .collect::<Result<Vec<_>>>()?;
    let spec = SyntheticSpec {
        true_alpha: a.alpha,
        true_shape: a.shape,
        factors: a.factors,
        factor_value_pools: pools,
        n: a.n,
        seed: a.seed,
    };
    let data = generate_synthetic(&spec)?;
    let dir = output_dir(&a.output)?;
    let path = dir.join("simulated.csv");
    let file = File::create(&path).with_context(|| format!("{}: cannot write", path.display()))?;
    data.write_csv(file)?;
    println!("{} rows written to {}", data.len(), path.display());
    Ok(())
}
