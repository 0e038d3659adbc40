namespace tri {}
