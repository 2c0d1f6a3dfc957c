use std::path::Path;

use puf_trng_core::bitstream::{read_stream, sidecar_path, write_stream};
use puf_trng_core::{
    generate_with_instance, sample_puf, GeneratorConfig, PufInstance, PufParameters, TapSet,
};

use crate::args::{GenerateArgs, PufNewArgs, SelftestArgs, TestArgs};
use crate::error::{CliError, CliResult};
use crate::manifest::{
    file_sha256, manifest_path, now, sha256_hex, write_json, GenerateInputs, RunInputs,
    RunManifest, TestInputs,
};
use crate::report::{analyze, render, AnalysisOptions, InputSummary, LengthSource, TestReport};
use crate::selftest::{parse_kat, run_selftest, BUILTIN_KAT};
use crate::Verdict;

pub fn puf_new(args: &PufNewArgs) -> CliResult<Verdict> {
    let started = now();
    let params = PufParameters {
        n_stages: args.stages,
        sigma_process: args.sigma_process,
        sigma_noise: args.sigma_noise,
        arbiter_offset: args.arbiter_offset,
        instance_seed: args.seed,
    };
    let instance = sample_puf(&params).map_err(|e| CliError::Usage(e.to_string()))?;
    instance
        .save(&args.out)
        .map_err(|e| CliError::io(&args.out, e))?;
    RunManifest::new(RunInputs::PufNew(args.clone()), started, &[&args.out])?
        .save(&manifest_path(&args.out))?;
    println!(
        "wrote {}-stage instance to {}",
        args.stages,
        args.out.display()
    );
    Ok(Verdict::Pass)
}

fn load_instance(path: &Path) -> CliResult<PufInstance> {
    PufInstance::load(path).map_err(|e| CliError::from_core(path, e))
}

fn resolve_generate(args: &GenerateArgs) -> CliResult<GenerateInputs> {
    if let Some(path) = &args.manifest {
        let RunInputs::Generate(mut inputs) = RunManifest::load(path)?.run else {
            return Err(CliError::Usage(format!(
                "{} is not a generate manifest",
                path.display()
            )));
        };
        if let Some(out) = &args.out {
            inputs.out = out.clone();
        }
        return Ok(inputs);
    }
    let (Some(instance_path), Some(bits), Some(out)) = (&args.instance, args.bits, &args.out)
    else {
        return Err(CliError::Usage(
            "--instance, --bits and --out are required".into(),
        ));
    };
    let instance = load_instance(instance_path)?;
    let taps = match &args.taps {
        Some(t) => TapSet::new(t.iter().copied()).map_err(|e| CliError::Usage(e.to_string()))?,
        None if instance.n_stages() == 128 => TapSet::default_128(),
        None => {
            return Err(CliError::Usage(format!(
                "--taps is required for a {}-stage instance",
                instance.n_stages()
            )))
        }
    };
    Ok(GenerateInputs {
        instance: instance_path.clone(),
        instance_sha256: file_sha256(instance_path)?,
        config: GeneratorConfig {
            puf_params: instance.params().clone(),
            taps,
            register_seed: args.register_seed.clone(),
            noise_seed: args.noise_seed,
            max_evaluations_per_bit: args.max_evaluations_per_bit,
        },
        bits,
        out: out.clone(),
    })
}

pub fn generate(args: &GenerateArgs) -> CliResult<Verdict> {
    let started = now();
    let inputs = resolve_generate(args)?;
    let instance = load_instance(&inputs.instance)?;
    if file_sha256(&inputs.instance)? != inputs.instance_sha256 {
        return Err(CliError::io(
            &inputs.instance,
            "instance file differs from the manifest",
        ));
    }
    inputs
        .config
        .validate()
        .map_err(|e| CliError::Usage(e.to_string()))?;
    let stream = generate_with_instance(&instance, &inputs.config, inputs.bits)
        .map_err(|e| CliError::from_core(&inputs.instance, e))?;
    write_stream(&inputs.out, &inputs.config, &stream).map_err(|e| CliError::io(&inputs.out, e))?;

    let sidecar = sidecar_path(&inputs.out);
    let out = inputs.out.clone();
    RunManifest::new(RunInputs::Generate(inputs), started, &[&out, &sidecar])?
        .save(&manifest_path(&out))?;
    let s = stream.stats;
    println!(
        "wrote {} bits to {}: {} evaluations, validity rate {:.6}",
        stream.length_bits,
        out.display(),
        s.evaluations,
        s.validity_rate
    );
    Ok(Verdict::Pass)
}

fn resolve_test(args: &TestArgs) -> CliResult<TestInputs> {
    if let Some(path) = &args.manifest {
        let RunInputs::Test(mut inputs) = RunManifest::load(path)?.run else {
            return Err(CliError::Usage(format!(
                "{} is not a test manifest",
                path.display()
            )));
        };
        if args.report.is_some() {
            inputs.report = args.report.clone();
        }
        return Ok(inputs);
    }
    let Some(input) = &args.input else {
        return Err(CliError::Usage("--input is required".into()));
    };
    Ok(TestInputs {
        input: input.clone(),
        input_sha256: file_sha256(input)?,
        battery: args.battery,
        bits_exact: args.bits_exact,
        sequence_length: args.sequence_length,
        sequences: args.sequences,
        alpha: args.alpha,
        report: args.report.clone(),
    })
}

/// Reads the input named by `inputs` and runs the batteries.
pub fn run_test_inputs(inputs: &TestInputs) -> CliResult<TestReport> {
    let (bytes, sidecar_len, meta) =
        read_stream(&inputs.input).map_err(|e| CliError::from_core(&inputs.input, e))?;
    let sha256 = sha256_hex(&bytes);
    if sha256 != inputs.input_sha256 {
        return Err(CliError::io(
            &inputs.input,
            "input differs from the manifest",
        ));
    }
    let (length_bits, length_source) = match (inputs.bits_exact, &meta) {
        (Some(n), _) => {
            if n > bytes.len() as u64 * 8 {
                return Err(CliError::Usage(format!(
                    "--bits-exact {n} exceeds the {} bits in the file",
                    bytes.len() as u64 * 8
                )));
            }
            (n, LengthSource::BitsExact)
        }
        (None, Some(_)) => (sidecar_len, LengthSource::Sidecar),
        (None, None) => (sidecar_len, LengthSource::FileSize),
    };
    let input = InputSummary {
        sha256,
        length_bits,
        length_source,
        config_digest: meta.map(|m| m.config_digest),
    };
    let options = AnalysisOptions {
        battery: inputs.battery,
        alpha: inputs.alpha,
        sequence_length: inputs.sequence_length,
        sequences: inputs.sequences,
    };
    analyze(&bytes, input, &options)
}

pub fn test(args: &TestArgs) -> CliResult<Verdict> {
    let started = now();
    let inputs = resolve_test(args)?;
    let report = run_test_inputs(&inputs)?;
    print!("{}", render(&report));
    if let Some(path) = &inputs.report {
        write_json(path, &report)?;
        let path = path.clone();
        RunManifest::new(RunInputs::Test(inputs), started, &[&path])?
            .save(&manifest_path(&path))?;
    }
    Ok(Verdict::from_pass(report.verdict))
}

pub fn selftest(args: &SelftestArgs) -> CliResult<Verdict> {
    let kat = match &args.kat_file {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
            parse_kat(&text).map_err(|e| {
                CliError::SelfTest(format!("{}: malformed table: {e}", path.display()))
            })?
        }
        None => parse_kat(BUILTIN_KAT).expect("built-in table parses"),
    };
    let checks = run_selftest(&kat);
    for c in &checks {
        println!(
            "{} {}: {}",
            if c.pass { "ok  " } else { "FAIL" },
            c.name,
            c.detail
        );
    }
    let failed = checks.iter().filter(|c| !c.pass).count();
    println!("{} checks, {failed} failed", checks.len());
    Ok(Verdict::from_pass(failed == 0))
}

pub fn report_show(path: &Path) -> CliResult<Verdict> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let report: TestReport = serde_json::from_str(&text).map_err(|e| CliError::io(path, e))?;
    print!("{}", render(&report));
    Ok(Verdict::Pass)
}
