from barycentric_treecode.cli import main_entry

main_entry()
