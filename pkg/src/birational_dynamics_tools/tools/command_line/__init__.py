from .command_line import RunManifest, bdt, load_run_manifest, main, run
