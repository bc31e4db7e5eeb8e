from .command_line import RunManifest, load_run_manifest, run
