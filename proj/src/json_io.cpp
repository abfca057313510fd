// json placeholder
