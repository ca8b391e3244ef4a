"""The commands of the `tse-nas.py` script, one module per subcommand."""
