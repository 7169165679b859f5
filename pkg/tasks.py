import os

from invoke import task

os.environ.setdefault("DJANGO_SETTINGS_MODULE", "settings.dev")

FIXTURES = "identifiability/data"


@task
def migrate(c):
    c.run("./manage.py migrate")


@task
def test(c):
    c.run("./manage.py test identifiability")


@task
def acceptance(c):
    """
    The full exhaustive sweeps (directed cycles to n = 6, trees to n = 5,
    all digraphs to n = 3). Expect several minutes.
    """
    c.run("COMPID_EXHAUSTIVE=1 ./manage.py test identifiability")


@task
def lint(c):
    c.run("ruff check .")
    c.run("ruff format --check .")
    c.run("mypy identifiability")


@task
def golden(c):
    """Print the reports for the two shipped example models."""
    c.run(f"./manage.py analyze {FIXTURES}/cycle4.json")
    c.run(f"./manage.py analyze {FIXTURES}/loop3.json")
    c.run(f'./manage.py functions {FIXTURES}/loop3.json --expr "a02+a03" --expr a02')
    c.run(f"./manage.py reparam {FIXTURES}/loop3.json --mode siso")


@task(pre=[migrate])
def databases(c, out="databases", workers=1):
    """
    Classification databases for every family at its largest practical size.
    """
    c.run(f"mkdir -p {out}")
    runs = [
        ("directed-cycle", "2..6", ""),
        ("bidirected-tree", "1..5", "--inputs 1 --outputs 1"),
        ("catenary", "1..6", "--inputs 1 --outputs 1"),
        ("mammillary", "2..5", "--inputs 1 --outputs 1"),
        ("directed-path", "2..6", "--inputs 1 --outputs 1"),
        ("all-digraphs", "1..3", ""),
    ]
    for family, sizes, extra in runs:
        c.run(
            f"./manage.py enumerate --family {family} --n {sizes} {extra} "
            f"--workers {workers} --store --out {out}/{family}.csv"
        )
