package shapes;

public class Rect implements Shape, Sized {
    private int width;
    private int height;

    public Rect() {
        this.width = 1;
        this.height = 1;
    }

    public Rect(int width, int height) {
        this.width = width;
        this.height = height;
    }

    public int area() {
        return width * height;
    }

    public String name() {
        return "rect";
    }

    public int size() {
        return area();
    }
}
