"""Fetch the UCI Adult training file into data/adult.csv.

The copy used here ships inside the BlackBoxAuditing source distribution on
PyPI (header row, predictor column "income-per-year"). The sha256 is checked
so results stay comparable. A headerless UCI ``adult.data`` file works too:
pass it with --from-file.
"""

import argparse
import hashlib
import shutil
import subprocess
import sys
import tarfile
import tempfile
from pathlib import Path

SDIST = "BlackBoxAuditing==0.1.54"
MEMBER = "BlackBoxAuditing-0.1.54/BlackBoxAuditing/test_data/adult.csv"
SHA256 = "c30ce1e55a965b04950321870db74c19f4aa437120a692f32e72f6a4fa31c418"
DEFAULT_OUT = Path(__file__).resolve().parents[1] / "data" / "adult.csv"


def sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def from_pypi(out: Path) -> None:
    with tempfile.TemporaryDirectory() as tmp:
        subprocess.run(
            [sys.executable, "-m", "pip", "download", SDIST, "--no-deps", "--no-binary", ":all:",
             "--timeout", "120", "--retries", "10", "-d", tmp, "-q"],
            check=True,
        )
        (archive,) = Path(tmp).glob("*.tar.gz")
        with tarfile.open(archive) as tar:
            src = tar.extractfile(MEMBER)
            with open(out, "wb") as fh:
                shutil.copyfileobj(src, fh)


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", type=Path, default=DEFAULT_OUT)
    ap.add_argument("--from-file", type=Path, help="copy a local Adult file instead of downloading")
    ap.add_argument("--force", action="store_true", help="overwrite an existing file")
    args = ap.parse_args()

    if args.out.exists() and not args.force:
        print(f"{args.out} exists (sha256 {sha256(args.out)}); use --force to replace")
        return 0
    args.out.parent.mkdir(parents=True, exist_ok=True)
    if args.from_file:
        shutil.copyfile(args.from_file, args.out)
    else:
        from_pypi(args.out)
    digest = sha256(args.out)
    if digest != SHA256:
        print(f"warning: sha256 {digest} differs from the reference copy {SHA256}", file=sys.stderr)
    print(f"wrote {args.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
