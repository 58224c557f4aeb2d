use std::fs::File;
use std::path::Path;

use local_nash::calculus::sup_norm;
use local_nash::classify::fmt_num;
use local_nash::olg::{
    ol_classify, ol_game_form, ol_gradient_play, read_profile, rollout_cost, simulate_costate, simulate_state,
    write_profile, ControlProfile, OlClassifyOptions, OlPlayOptions, OpenLoopGame,
};
use local_nash::solve::{
    continue_path, gradient_play, multi_start, ContinuationOptions, ContinuationPath, FlowOptions, FlowTrajectory,
    MultiStartOptions, NewtonOptions, PathStatus, StepControl,
};
use local_nash::{classify_point, EquilibriumReport};
use serde_json::json;

use crate::cli::{
    ClassifyArgs, ContinueArgs, FlowArgs, Integrator, OlgClassifyArgs, OlgCommand, OlgInput, OlgPlayArgs,
    OlgSimulateArgs, SolveArgs,
};
use crate::error::{CliError, CliResult};
use crate::io::{self, fmt_point, fmt_value, RunManifest};

fn write_reports(path: &Path, reports: &[EquilibriumReport], m: usize, n_players: usize) -> CliResult<()> {
    if io::is_json(path) {
        io::write_json(path, reports)
    } else {
        io::write_csv(
            path,
            EquilibriumReport::csv_header(m, n_players),
            reports.iter().map(EquilibriumReport::csv_record),
        )
    }
}

pub fn classify(args: &ClassifyArgs) -> CliResult<()> {
    let game = io::load_game(&args.game)?;
    let tol = args.tol.tolerances();
    tol.validate()?;
    let mut points = args
        .point
        .iter()
        .map(|p| io::parse_vector(p))
        .collect::<CliResult<Vec<_>>>()?;
    if let Some(path) = &args.points {
        points.extend(io::read_points(path)?);
    }
    if points.is_empty() {
        return Err(CliError::Input("give at least one --point or a --points file".into()));
    }
    let reports = points
        .iter()
        .map(|u| classify_point(&game, u, &tol, args.deriv.into()))
        .collect::<Result<Vec<_>, _>>()?;

    if args.json {
        say!("{}", serde_json::to_string_pretty(&reports).expect("serializable reports"));
    } else {
        for r in &reports {
            say!("({}): {}", fmt_point(&r.point), r.verdict);
        }
    }
    if let Some(out) = &args.out {
        write_reports(out, &reports, game.dim(), game.n_players())?;
        RunManifest::new("classify", &args.game)
            .options(args)
            .tolerances(tol)
            .write_beside(out)?;
    }
    Ok(())
}

pub fn solve(args: &SolveArgs) -> CliResult<()> {
    let game = io::load_game(&args.game)?;
    let bounds = io::parse_box(&args.bounds, game.dim())?;
    let opts = MultiStartOptions {
        k: args.k,
        seed: args.seed,
        newton: NewtonOptions {
            method: args.deriv.into(),
            tolerances: args.tol.tolerances(),
            ..NewtonOptions::default()
        },
        ..MultiStartOptions::default()
    };
    let res = multi_start(&game, &bounds, &opts)?;

    if args.json {
        say!("{}", serde_json::to_string_pretty(&res).expect("serializable result"));
    } else {
        let t = &res.tally;
        say!(
            "{} root(s) from {} starts; failures: {} singular jacobian, {} max iterations, {} non-finite, {} other",
            res.roots.len(),
            args.k,
            t.singular_jacobian,
            t.max_iters,
            t.non_finite,
            t.other
        );
        for r in &res.roots {
            say!("({}): {} [{} hits]", fmt_point(&r.point), r.report.verdict, r.hits);
        }
    }
    if let Some(out) = &args.out {
        if io::is_json(out) {
            io::write_json(out, &res)?;
        } else {
            let mut header: Vec<String> = (1..=game.dim()).map(|k| format!("u{k}")).collect();
            header.extend(["omega_norm", "sigma_min", "hits", "verdict"].map(String::from));
            let rows = res.roots.iter().map(|r| {
                let mut row: Vec<String> = r.point.iter().map(|x| fmt_num(*x)).collect();
                row.push(fmt_num(r.report.omega_norm));
                row.push(fmt_num(r.report.sigma_min()));
                row.push(r.hits.to_string());
                row.push(r.report.verdict.code().to_string());
                row
            });
            io::write_csv(out, header, rows)?;
        }
        RunManifest::new("solve", &args.game)
            .options(json!({ "args": args, "multi_start": opts, "box": bounds }))
            .tolerances(opts.newton.tolerances)
            .seed(args.seed)
            .write_beside(out)?;
    }
    Ok(())
}

pub fn flow(args: &FlowArgs) -> CliResult<()> {
    let game = io::load_game(&args.game)?;
    let u0 = io::parse_vector(&args.point)?;
    let step = match args.integrator {
        Integrator::Rk4 => StepControl::Rk4 { dt: args.dt },
        Integrator::Rk45 => StepControl::Rk45 {
            rtol: args.rtol,
            atol: args.atol,
        },
    };
    let opts = FlowOptions {
        step,
        t_max: args.tmax,
        tol_stop: args.tol_stop,
        norm_bound: args.norm_bound,
        method: args.deriv.into(),
    };
    let tr = gradient_play(&game, &u0, &opts)?;
    say!("outcome: {}", tr.outcome.code());
    say!(
        "final point: ({}) at t = {}, |omega| = {:e}, {} steps",
        fmt_point(tr.final_point()),
        tr.times.last().copied().unwrap_or(0.0),
        tr.omega_norms.last().copied().unwrap_or(f64::NAN),
        tr.times.len() - 1
    );
    if let Some(out) = &args.out {
        io::write_csv(out, FlowTrajectory::csv_header(game.dim()), tr.csv_records())?;
        RunManifest::new("flow", &args.game)
            .options(json!({ "args": args, "flow": opts }))
            .tolerances(json!({ "tol_stop": opts.tol_stop, "norm_bound": opts.norm_bound, "step": opts.step }))
            .write_beside(out)?;
    }
    Ok(())
}

pub fn continuation(args: &ContinueArgs) -> CliResult<()> {
    let game = io::load_game(&args.game)?;
    let u_star = io::parse_vector(&args.point)?;
    let zeta = io::parse_zeta(&args.zeta, &game)?;
    let opts = ContinuationOptions {
        s_range: io::parse_range(&args.s_range)?,
        ds: args.ds,
        newton: NewtonOptions {
            method: args.deriv.into(),
            tolerances: args.tol.tolerances(),
            ..NewtonOptions::default()
        },
        fold_tol: args.fold_tol,
    };
    let path = continue_path(&game, &zeta, &u_star, &opts)?;
    match path.status {
        PathStatus::Complete => say!("status: complete"),
        PathStatus::FoldDetected { s } => say!("status: fold detected at s = {s}"),
        PathStatus::LostTrack { s } => say!("status: lost track at s = {s}"),
    }
    for ((s, p), r) in path.s_values.iter().zip(&path.points).zip(&path.reports) {
        say!("s = {s}: ({}) {}", fmt_point(p), r.verdict);
    }
    if let Some(out) = &args.out {
        io::write_csv(out, ContinuationPath::csv_header(game.dim()), path.csv_records())?;
        RunManifest::new("continue", &args.game)
            .options(json!({ "args": args, "continuation": opts }))
            .tolerances(json!({ "classify": opts.newton.tolerances, "newton_residual": opts.newton.residual_tol, "fold_tol": opts.fold_tol }))
            .write_beside(out)?;
    }
    Ok(())
}

fn initial_profile(olg: &OpenLoopGame, input: &OlgInput) -> CliResult<ControlProfile> {
    if let Some(path) = &input.profile {
        let file = File::open(path).map_err(|source| CliError::Read {
            path: path.clone(),
            source,
        })?;
        return Ok(read_profile(olg, file)?);
    }
    match &input.constant {
        Some(text) => {
            let values = io::parse_vector(text)?;
            let total: usize = olg.control_dims().iter().sum();
            if values.len() != total {
                return Err(CliError::Input(format!(
                    "--constant needs {total} numbers, got {}",
                    values.len()
                )));
            }
            Ok(ControlProfile::constant(olg, &values))
        }
        None => Ok(ControlProfile::zeros(olg)),
    }
}

fn save_profile(olg: &OpenLoopGame, profile: &ControlProfile, out: &Path) -> CliResult<()> {
    let file = File::create(out).map_err(|source| CliError::Write {
        path: out.to_path_buf(),
        source,
    })?;
    Ok(write_profile(olg, profile, file)?)
}

fn olg_manifest(command: &str, input: &OlgInput, olg: &OpenLoopGame) -> RunManifest {
    RunManifest::new(command, &input.game).options(json!({
        "input": input,
        "steps": olg.steps(),
        "horizon": olg.horizon(),
    }))
}

pub fn olg(cmd: &OlgCommand) -> CliResult<()> {
    match cmd {
        OlgCommand::Simulate(a) => olg_simulate(a),
        OlgCommand::Gradient(a) => olg_gradient(a),
        OlgCommand::Play(a) => olg_play(a),
        OlgCommand::Classify(a) => olg_classify(a),
    }
}

fn olg_simulate(args: &OlgSimulateArgs) -> CliResult<()> {
    let olg = io::load_olg(&args.input.game)?;
    let u = initial_profile(&olg, &args.input)?;
    let state = simulate_state(&olg, &u)?;
    let costates = if args.costate {
        (0..olg.n_players())
            .map(|i| simulate_costate(&olg, i, &state, &u))
            .collect::<Result<Vec<_>, _>>()?
    } else {
        Vec::new()
    };
    say!("x(T) = ({})", fmt_point(state.terminal()));
    for i in 0..olg.n_players() {
        say!("player {}: terminal cost {}", i + 1, fmt_value(olg.terminal_cost(i).value(state.terminal())));
    }
    if let Some(out) = &args.input.out {
        let d = olg.state_dim();
        let mut header = vec!["t".to_string()];
        header.extend((1..=d).map(|j| format!("x{j}")));
        for c in &costates {
            header.extend((1..=d).map(|j| format!("p{}_{j}", c.player + 1)));
        }
        let rows = (0..state.times.len()).map(|k| {
            let mut row = vec![fmt_num(state.times[k])];
            row.extend(state.states[k].iter().map(|v| fmt_num(*v)));
            for c in &costates {
                row.extend(c.costates[k].iter().map(|v| fmt_num(*v)));
            }
            row
        });
        io::write_csv(out, header, rows)?;
        olg_manifest("olg simulate", &args.input, &olg)
            .options(json!({ "input": &args.input, "costate": args.costate, "steps": olg.steps() }))
            .write_beside(out)?;
    }
    Ok(())
}

fn olg_gradient(input: &OlgInput) -> CliResult<()> {
    let olg = io::load_olg(&input.game)?;
    let u = initial_profile(&olg, input)?;
    let w = ol_game_form(&olg, &u)?;
    for i in 0..olg.n_players() {
        say!(
            "player {}: max |gradient| {:e}, terminal cost {}",
            i + 1,
            sup_norm(w.player(i)),
            fmt_value(rollout_cost(&olg, i, &u)?)
        );
    }
    say!("game form sup-norm: {:e}", sup_norm(&w.flatten()));
    if let Some(out) = &input.out {
        save_profile(&olg, &w, out)?;
        olg_manifest("olg gradient", input, &olg).write_beside(out)?;
    }
    Ok(())
}

fn olg_play(args: &OlgPlayArgs) -> CliResult<()> {
    let olg = io::load_olg(&args.input.game)?;
    let u0 = initial_profile(&olg, &args.input)?;
    let opts = OlPlayOptions {
        step_size: args.step_size,
        max_iters: args.max_iters,
        tol: args.tol,
        ..OlPlayOptions::default()
    };
    let res = ol_gradient_play(&olg, &u0, &opts)?;
    let status = serde_json::to_value(res.status).expect("serializable status");
    say!("status: {}", status.as_str().unwrap_or_default());
    say!(
        "iterations: {}, game form sup-norm {:e}",
        res.iterations,
        res.norms.last().copied().unwrap_or(f64::NAN)
    );
    say!("x(T) = ({})", fmt_point(simulate_state(&olg, &res.profile)?.terminal()));
    if let Some(out) = &args.input.out {
        save_profile(&olg, &res.profile, out)?;
        olg_manifest("olg play", &args.input, &olg)
            .options(json!({ "input": &args.input, "play": opts, "steps": olg.steps() }))
            .tolerances(json!({ "tol": opts.tol, "divergence_bound": opts.divergence_bound }))
            .write_beside(out)?;
    }
    Ok(())
}

fn olg_classify(args: &OlgClassifyArgs) -> CliResult<()> {
    let olg = io::load_olg(&args.input.game)?;
    let u = initial_profile(&olg, &args.input)?;
    let opts = OlClassifyOptions {
        fd_step: args.fd_step,
        max_unknowns: args.max_unknowns,
        tolerances: args.tol.tolerances(),
    };
    opts.tolerances.validate()?;
    let r = ol_classify(&olg, &u, &opts)?;
    if args.json {
        say!("{}", serde_json::to_string_pretty(&r).expect("serializable report"));
    } else {
        say!("N = {} intervals, {} unknowns: {}", olg.steps(), olg.unknowns(), r.verdict);
        say!(
            "d omega {} (sigma_min/sigma_max = {:.3e}), |omega| = {:.3e}",
            if r.jacobian_degenerate() { "degenerate" } else { "non-degenerate" },
            r.sigma_ratio(),
            r.omega_norm
        );
    }
    if let Some(out) = &args.input.out {
        let m = olg.unknowns();
        write_reports(out, std::slice::from_ref(&r), m, olg.n_players())?;
        olg_manifest("olg classify", &args.input, &olg)
            .options(json!({ "input": &args.input, "classify": opts, "steps": olg.steps() }))
            .tolerances(opts.tolerances)
            .write_beside(out)?;
    }
    Ok(())
}
