"""Main application entry point."""
from .transport.cli.commands import cli


def main():
    """Start the stirap command line."""
    cli(prog_name="stirap")


if __name__ == "__main__":
    main()
